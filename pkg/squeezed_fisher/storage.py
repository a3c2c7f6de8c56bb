import posixpath
import sys
import uuid

from fsspec import AbstractFileSystem, filesystem
from traitlets import Dict, Type, Unicode
from traitlets.config import LoggingConfigurable


class OutputTarget(LoggingConfigurable):
    """
    Where command output (CSV tables, JSON records) gets written
    """

    fsspec_class = Type(
        klass=AbstractFileSystem,
        config=True,
        help="""
        FSSpec Filesystem to instantiate as class for this target.

        Left unset, output goes to the local filesystem.
        """,
    )

    fsspec_args = Dict(
        {},
        config=True,
        help="""
        Args to pass to fsspec_class during instantiation
        """,
    )

    root_path = Unicode(
        "",
        config=True,
        help="""
        Root path that relative output paths are resolved against.

        If {command} is present in the root_path, it will be expanded to the
        name of the command being run.
        """,
    )

    def is_default(self):
        """
        Return if no filesystem has been configured
        """
        return self.fsspec_class == AbstractFileSystem

    def get_filesystem(self) -> AbstractFileSystem:
        if self.is_default():
            return filesystem("file")
        return self.fsspec_class(**self.fsspec_args)

    def resolve(self, path: str, command: str = "") -> str:
        root = self.root_path.format(command=command)
        if not root or path.startswith("/"):
            return path
        return f"{root.rstrip('/')}/{path}"

    def write(self, path: str, text: str, command: str = "") -> str:
        """
        Write `text` to `path`, or to stdout if path is "-".

        Files are written to a temporary sibling first and then moved into
        place. Returns the resolved path.
        """
        if path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            return path

        fs = self.get_filesystem()
        final = self.resolve(path, command)
        parent = posixpath.dirname(final)
        if parent:
            fs.makedirs(parent, exist_ok=True)
        partial = f"{final}.partial-{uuid.uuid4().hex}"
        with fs.open(partial, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        fs.mv(partial, final)
        self.log.debug(f"Wrote {len(text)} characters to {final} via {self}")
        return final

    def __str__(self):
        """
        Return sanitized string representation, stripped of possible secrets
        """
        # Only show keys and type of values of args to fsspec, as they might contain secrets
        fsspec_args_filtered = ", ".join(
            f"{k}=<{type(v).__name__}>" for k, v in self.fsspec_args.items()
        )
        return f'OutputTarget({self.fsspec_class.__name__}({fsspec_args_filtered}), root_path="{self.root_path}")'
