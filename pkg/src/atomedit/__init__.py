"""Mining and analysing atomic insertion/deletion edits from Wikipedia revision history."""

from .types import AtomicEdit, Category, DiffResult, EditKind, Sentence

__version__ = "0.1.0"

__all__ = ["AtomicEdit", "Category", "DiffResult", "EditKind", "Sentence", "__version__"]
