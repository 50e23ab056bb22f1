#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os

from setuptools import find_packages, setup


def get_version(relative_path: str) -> str:
    package_root = os.path.abspath(os.path.dirname(__file__))
    version = {}
    with open(os.path.join(package_root, relative_path)) as version_fp:
        exec(version_fp.read(), version)
        return version["__version__"]


with open("README.md", "r", encoding="utf-8") as readme:
    long_description = readme.read()

setup(
    name="epstein-zeros",
    version=get_version("epstein_zeros/version.py"),
    license="MIT",
    description=(
        "Zeros of Epstein zeta functions, Hecke L-functions of imaginary"
        " quadratic fields and their random Euler product model"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=("tests",)),
    package_data={"epstein_zeros": ["fixtures/*.json"]},
    python_requires=">=3.9",
    classifiers=[
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Microsoft :: Windows",
        "Operating System :: POSIX :: Linux",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    entry_points="""
        [console_scripts]
        epstein-zeros-cli=epstein_zeros.cli:cli
    """,
    install_requires=[
        "cryptography>=3.0",
        "mpmath>=1.2",
        "numpy>=1.21",
        "scipy>=1.7",
        "sympy>=1.9",
    ],
)
