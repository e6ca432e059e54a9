"""State-based scheduling with worst-case service guarantees."""
from wcsched.config import Config, load_config

__version__ = "0.1.0"
__all__ = ["Config", "load_config"]
