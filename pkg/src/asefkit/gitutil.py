"""Thin wrapper around the git command line interface.

Everything the toolchain needs from version control: resolving heads,
listing commits and their changed paths, reading file contents at a
commit, materializing a commit into a workspace directory, and
committing/pushing report files.  Works against bare and non-bare
repositories.
"""

from __future__ import annotations

import io
import subprocess
import tarfile
from pathlib import Path

from asefkit.errors import CheckoutError, RepoUnavailableError


class GitError(RepoUnavailableError):
    pass


def _run(args: list[str], cwd: Path | None = None, check: bool = True) -> subprocess.CompletedProcess:
    proc = subprocess.run(
        ["git", *args],
        cwd=str(cwd) if cwd else None,
        capture_output=True,
    )
    if check and proc.returncode != 0:
        raise GitError(
            f"git {' '.join(args)} failed ({proc.returncode}): "
            f"{proc.stderr.decode(errors='replace').strip()}"
        )
    return proc


class GitRepo:
    def __init__(self, path: str | Path):
        self.path = Path(path)

    @classmethod
    def init(cls, path: str | Path, bare: bool = False, initial_branch: str = "main") -> "GitRepo":
        args = ["init", f"--initial-branch={initial_branch}"]
        if bare:
            args.append("--bare")
        args.append(str(path))
        _run(args)
        repo = cls(path)
        if not bare:
            repo.configure_identity()
        return repo

    @classmethod
    def clone(cls, source: str | Path, dest: str | Path) -> "GitRepo":
        _run(["clone", "--quiet", str(source), str(dest)])
        repo = cls(dest)
        repo.configure_identity()
        return repo

    def configure_identity(self) -> None:
        _run(["config", "user.email", "toolchain@localhost"], cwd=self.path)
        _run(["config", "user.name", "analysis toolchain"], cwd=self.path)

    def head(self) -> str | None:
        proc = _run(["rev-parse", "HEAD"], cwd=self.path, check=False)
        if proc.returncode != 0:
            return None  # repository without commits
        return proc.stdout.decode().strip()

    def commits_between(self, old: str | None, new: str) -> list[str]:
        """Commits after ``old`` up to ``new``, oldest first."""
        spec = f"{old}..{new}" if old else new
        proc = _run(["rev-list", "--reverse", spec], cwd=self.path)
        return [line for line in proc.stdout.decode().splitlines() if line]

    def changed_paths(self, commit: str) -> list[str]:
        proc = _run(
            ["diff-tree", "--no-commit-id", "--name-only", "-r", "--root", commit],
            cwd=self.path,
        )
        return [line for line in proc.stdout.decode().splitlines() if line]

    def list_files(self, commit: str) -> list[str]:
        proc = _run(["ls-tree", "-r", "--name-only", commit], cwd=self.path)
        return [line for line in proc.stdout.decode().splitlines() if line]

    def show_file(self, commit: str, path: str) -> bytes:
        proc = _run(["show", f"{commit}:{path}"], cwd=self.path, check=False)
        if proc.returncode != 0:
            raise FileNotFoundError(f"{path!r} does not exist at commit {commit[:12]}")
        return proc.stdout

    def checkout_into(self, commit: str, dest: str | Path) -> None:
        """Materialize the tree of a commit into ``dest``."""
        dest = Path(dest)
        dest.mkdir(parents=True, exist_ok=True)
        proc = _run(["archive", "--format=tar", commit], cwd=self.path, check=False)
        if proc.returncode != 0:
            raise CheckoutError(
                f"cannot archive commit {commit[:12]}: "
                f"{proc.stderr.decode(errors='replace').strip()}"
            )
        with tarfile.open(fileobj=io.BytesIO(proc.stdout)) as tar:
            tar.extractall(dest)

    def add_and_commit(self, paths: list[str], message: str) -> str | None:
        """Stage the given paths; returns the new commit hash, or None if clean."""
        _run(["add", "--", *paths], cwd=self.path)
        status = _run(["status", "--porcelain"], cwd=self.path)
        if not status.stdout.strip():
            return None
        _run(["commit", "--quiet", "-m", message], cwd=self.path)
        head = self.head()
        assert head is not None
        return head

    def push(self, remote: str = "origin", refspec: str | None = None) -> None:
        args = ["push", "--quiet", remote]
        if refspec:
            args.append(refspec)
        _run(args, cwd=self.path)

    def pull(self) -> None:
        _run(["pull", "--quiet", "--ff-only"], cwd=self.path, check=False)
