"""
Version lookup for run manifests and the `version` command.
"""

import subprocess
from importlib.metadata import PackageNotFoundError, version
from typing import Dict

from vqdyn.constants import DEFAULT_VERSION


def get_current_version() -> str:
    """
    Get the current version of vqdyn.
    Installed package metadata wins, then the latest git tag, then the fallback version.
    """
    try:
        return f"v{version('vqdyn')}"
    except PackageNotFoundError:
        pass

    try:
        result = subprocess.run(
            ["git", "describe", "--tags", "--abbrev=0"],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            check=False,
        )
        if result.returncode == 0 and result.stdout.strip():
            return result.stdout.strip()
    except OSError:
        pass

    return DEFAULT_VERSION


def get_dependency_versions() -> Dict[str, str]:
    """Versions of the numerical stack, recorded in every run manifest."""
    import numpy
    import scipy

    return {
        "vqdyn": get_current_version(),
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
    }
