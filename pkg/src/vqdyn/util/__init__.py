from .helpers import FileSystem

__all__ = ["FileSystem"]
