#!/usr/bin/env python

requirements = ["numpy", "scipy", "yacs", "tqdm", "matplotlib"]


if __name__ == '__main__':
    from setuptools import find_packages
    from setuptools import setup

    setup(
        name="cmps_tomo",
        version="0.1",
        description="tomography of continuous matrix product states from correlation functions",
        packages=find_packages(exclude=("configs", "tests",)),
        install_requires=requirements,
        entry_points={
            "console_scripts": ["cmps-tomo=cmps_tomo.engine.commands:main"],
        },
    )
