# Sphinx configuration of the fuzzbench documentation.

import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join("..", "src")))

from pkcs1_fuzzbench import __author__, __version__  # noqa: E402

project = "PKCS#1 v1.5 Fuzzer Evaluation Bench"
copyright = f"2024, {__author__}"
author = __author__
version = __version__
release = __version__

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.viewcode",
    "sphinx.ext.napoleon",
    "sphinx.ext.githubpages",
    "sphinx.ext.doctest",
]

templates_path = ["_templates"]
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]

html_theme = "alabaster"
html_static_path = ["_static"]

napoleon_google_docstring = False
napoleon_numpy_docstring = True

autodoc_mock_imports = ["Levenshtein", "rapidfuzz", "tomli"]

autodoc_default_options = {
    "members": True,
    "undoc-members": True,
    "show-inheritance": True,
}
