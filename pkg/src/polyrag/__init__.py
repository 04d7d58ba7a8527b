"""polyrag: multilingual, voice-capable RAG over a private document corpus.

Any input language or modality is normalized to English for retrieval and
generation, then delivered back in the language (and modality) it arrived in.
Everything runs offline by default: the embedder, translator, speech
providers, and LLM all have deterministic mock implementations so the full
pipeline is testable without vendor accounts.
"""

__version__ = "0.1.0"
