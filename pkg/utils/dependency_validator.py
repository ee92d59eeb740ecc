"""
Startup check that the numeric stack SD Bench needs is importable.
"""

import os
import sys
from typing import List, Optional, Tuple

DEFAULT_REQUIREMENTS = ['numpy', 'matplotlib']


def get_requirements_list(requirements_file: str = "requirements.txt") -> List[str]:
    """Package names from requirements.txt, without version constraints."""
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    requirements_path = os.path.join(root, requirements_file)
    if not os.path.exists(requirements_path):
        return list(DEFAULT_REQUIREMENTS)

    requirements = []
    with open(requirements_path, 'r', encoding='utf-8') as f:
        for line in f:
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            for sep in ('>=', '==', '~=', '<', '>', '['):
                line = line.split(sep)[0]
            if line.strip():
                requirements.append(line.strip())
    return requirements or list(DEFAULT_REQUIREMENTS)


def check_dependency(package_name: str) -> Tuple[bool, Optional[str]]:
    try:
        __import__(package_name)
        return True, None
    except ImportError as e:
        return False, str(e)


def validate_all_dependencies() -> Tuple[bool, List[str], List[str]]:
    """Returns (all_satisfied, missing_packages, error_messages)."""
    missing_packages = []
    error_messages = []
    for package in get_requirements_list():
        available, error = check_dependency(package)
        if not available:
            missing_packages.append(package)
            error_messages.append(f"  ❌ {package}: {error}")
    return not missing_packages, missing_packages, error_messages


def print_dependency_error(missing_packages: List[str], error_messages: List[str]) -> None:
    print("\n" + "=" * 72, file=sys.stderr)
    print("🔴 DEPENDENCY ERROR - Missing Required Packages", file=sys.stderr)
    print("=" * 72, file=sys.stderr)
    for line in error_messages:
        print(line, file=sys.stderr)
    print("\n💡 QUICK FIX:", file=sys.stderr)
    print(f"  pip install {' '.join(missing_packages)}", file=sys.stderr)
    print("  or, from the repository root: pip install -e .", file=sys.stderr)
    print("=" * 72, file=sys.stderr)


def validate_dependencies_with_helpful_exit() -> None:
    """Call at startup; exits with status 1 if a required package is missing."""
    all_satisfied, missing_packages, error_messages = validate_all_dependencies()
    if not all_satisfied:
        print_dependency_error(missing_packages, error_messages)
        sys.exit(1)
