/** Microphone capture and 16 kHz mono WAV encoding for voice messages. */

export const TARGET_SAMPLE_RATE = 16000;

/** Linear-interpolation resampling to the target rate. */
export function resampleLinear(
  samples: Float32Array,
  fromRate: number,
  toRate: number,
): Float32Array {
  if (fromRate === toRate || samples.length === 0) return samples;
  const ratio = fromRate / toRate;
  const length = Math.max(1, Math.round(samples.length / ratio));
  const out = new Float32Array(length);
  for (let i = 0; i < length; i++) {
    const position = i * ratio;
    const index = Math.floor(position);
    const fraction = position - index;
    const a = samples[Math.min(index, samples.length - 1)];
    const b = samples[Math.min(index + 1, samples.length - 1)];
    out[i] = a + (b - a) * fraction;
  }
  return out;
}

/** PCM16 little-endian WAV container with the canonical 44-byte header. */
export function encodeWavPcm16(samples: Float32Array, sampleRate: number): ArrayBuffer {
  const resampled = resampleLinear(samples, sampleRate, TARGET_SAMPLE_RATE);
  const buffer = new ArrayBuffer(44 + resampled.length * 2);
  const view = new DataView(buffer);
  const writeAscii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };
  const byteRate = TARGET_SAMPLE_RATE * 2; // mono, 16-bit
  writeAscii(0, "RIFF");
  view.setUint32(4, 36 + resampled.length * 2, true);
  writeAscii(8, "WAVE");
  writeAscii(12, "fmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, TARGET_SAMPLE_RATE, true);
  view.setUint32(28, byteRate, true);
  view.setUint16(32, 2, true); // block align
  view.setUint16(34, 16, true); // bits per sample
  writeAscii(36, "data");
  view.setUint32(40, resampled.length * 2, true);
  let offset = 44;
  for (const sample of resampled) {
    const clamped = Math.max(-1, Math.min(1, sample));
    view.setInt16(offset, Math.round(clamped * 32767), true);
    offset += 2;
  }
  return buffer;
}

export function bufferToBase64(buffer: ArrayBuffer): string {
  const bytes = new Uint8Array(buffer);
  let binary = "";
  const chunk = 0x8000;
  for (let i = 0; i < bytes.length; i += chunk) {
    binary += String.fromCharCode(...bytes.subarray(i, i + chunk));
  }
  return btoa(binary);
}

export function base64ToBlobUrl(b64: string, mime = "audio/wav"): string {
  const binary = atob(b64);
  const bytes = new Uint8Array(binary.length);
  for (let i = 0; i < binary.length; i++) bytes[i] = binary.charCodeAt(i);
  return URL.createObjectURL(new Blob([bytes], { type: mime }));
}

/** Minimal recorder contract so tests can substitute a scripted one. */
export interface RecorderLike {
  stop(): Promise<{ samples: Float32Array; sampleRate: number }>;
}

export type RecorderFactory = () => Promise<RecorderLike>;

/**
 * Capture microphone audio via Web Audio. A ScriptProcessor drains input
 * into memory until stop(); callers then encode the takes as WAV.
 */
export async function startMicrophoneRecorder(): Promise<RecorderLike> {
  const stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  const context = new AudioContext();
  const source = context.createMediaStreamSource(stream);
  const processor = context.createScriptProcessor(4096, 1, 1);
  const taken: Float32Array[] = [];
  processor.onaudioprocess = (event) => {
    taken.push(new Float32Array(event.inputBuffer.getChannelData(0)));
  };
  source.connect(processor);
  processor.connect(context.destination);

  return {
    async stop() {
      processor.disconnect();
      source.disconnect();
      stream.getTracks().forEach((track) => track.stop());
      const sampleRate = context.sampleRate;
      await context.close();
      const total = taken.reduce((n, part) => n + part.length, 0);
      const samples = new Float32Array(total);
      let offset = 0;
      for (const part of taken) {
        samples.set(part, offset);
        offset += part.length;
      }
      return { samples, sampleRate };
    },
  };
}
