"""flowcorr - flow correlation laboratory."""
__version__ = "0.1.0"

from .cli import main  # noqa: F401
