from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.strip() for line in fh if line.strip() and not line.startswith("#")]

setup(
    name="gogsep",
    version="1.0.0",
    description="gogsep - Residual p-separation for graphs of finite p-groups",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    py_modules=["cli_main", "utils", "run_job"],
    install_requires=requirements,
    extras_require={
        "dev": ["pytest>=7.4", "hypothesis>=6.90"],
    },
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "gogsep=cli_main:main",
        ],
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
