#!/usr/bin/env python3

from setuptools import setup, find_packages

setup(
    name="vnlcm",
    version="0.1.0",
    description="Value-number driven Lazy Code Motion optimizer for a textual SSA IR",
    author="vnlcm developers",
    packages=find_packages("src"),
    package_dir={"": "src"},
    include_package_data=True,
    package_data={"vnlcm.corpus": ["*.ir", "cases.yaml"]},
    python_requires=">=3.8",
    install_requires=[
        "numpy>=1.19.0",
        "pyyaml>=5.1",
        "networkx>=2.5",
    ],
    extras_require={
        "schema": ["jsonschema>=3.2.0"],
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=2.10.0",
            "hypothesis>=6.0.0",
            "black>=20.8b1",
            "flake8>=3.8.0",
            "mypy>=0.782",
        ],
    },
    entry_points={
        "console_scripts": [
            "vnlcm=vnlcm.__main__:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Topic :: Software Development :: Compilers",
        "Topic :: Software Development :: Testing",
    ],
)
