"""File-based bridge between pretrained audio models and the mira engine.

Runs a checkpointed model (CLAP music embeddings, Discogs-EffNet track
embeddings, or the PaSST Audioset classifier) over a directory of WAV files
and writes MIRAEMB1/MIRAPRB1 files plus a manifest. Stateless by design: no
RPC, no shared runtime with the engine, just the binary interchange formats.
"""

__version__ = "0.1.0"

from .backends import BACKENDS, BridgeModelError, ModelBackend, resolve_backend
from .formats import write_embedding_file, write_prob_file
from .jobs import BridgeJob, extract_embeddings, extract_label_probs
