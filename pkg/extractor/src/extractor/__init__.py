from .job import ExtractionJob
from .extract import extract

__all__ = ["ExtractionJob", "extract"]
__version__ = "0.1.0"
