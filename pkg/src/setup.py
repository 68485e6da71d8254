from setuptools import setup

from pkcs1_fuzzbench import __author__, __version__

setup(
    name="pkcs1_fuzzbench",
    version=__version__,
    description="PKCS#1 v1.5 fuzzer evaluation bench",
    author=__author__,
    packages=[
        "pkcs1_fuzzbench",
        "pkcs1_fuzzbench.controller",
        "pkcs1_fuzzbench.eval",
        "pkcs1_fuzzbench.generators",
        "pkcs1_fuzzbench.pkcs1",
        "pkcs1_fuzzbench.validator",
    ],
    package_data={"pkcs1_fuzzbench.pkcs1": ["keys/*.json"]},
    python_requires=">=3.9",
    install_requires=[
        "tqdm",
        "tabulate",
        "sortedcontainers",
        "Levenshtein",
        "rapidfuzz",
        "tomli; python_version < '3.11'",
    ],
    entry_points={"console_scripts": ["fuzzbench=pkcs1_fuzzbench.cli:run"]},
)
