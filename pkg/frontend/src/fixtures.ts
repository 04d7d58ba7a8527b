/**
 * A bundled Urdu voice note in the offline providers' WAV dialect. Real
 * microphone audio needs a real speech-to-text provider; this fixture lets
 * the voice path be demonstrated end-to-end against the mock stack.
 */
export const DEMO_VOICE_NOTE_B64 =
  "UklGRloAAABXQVZFZm10IBAAAAABAAEAgD4AAAB9AAACABAAZGF0YTYAAAB1cnzYqtmG2K7ZiNin24HbjNq6INqp2Kgg2KfYr9inINqp24wg2KzYp9iq24wg24HbjNq62J8=";

export const DEMO_VOICE_NOTE_LABEL = "demo voice note (Urdu)";
