from importlib_metadata import PackageNotFoundError, version

try:
    __version__ = version("squeezed-fisher")
except PackageNotFoundError:
    __version__ = "0.0.0+unknown"

from .states import InterferometerInput  # noqa
