/** Right-to-left rendering for Arabic-script replies (Urdu among them). */

const RTL_PREFIXES = ["ar", "fa", "he", "ps", "ur"];

export function isRtl(languageCode: string | null | undefined): boolean {
  if (!languageCode) return false;
  const code = languageCode.toLowerCase();
  return RTL_PREFIXES.some((p) => code === p || code.startsWith(`${p}-`));
}

export function directionFor(languageCode: string | null | undefined): "rtl" | "ltr" {
  return isRtl(languageCode) ? "rtl" : "ltr";
}
