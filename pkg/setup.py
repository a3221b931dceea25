from setuptools import setup, find_packages

setup(
    name='revealib',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'numpy',
        'scipy',
        'quadprog',
        'pandas',
        'matplotlib',
        'tqdm',
        'PyYAML',
        'toml',
        'pytz',
        'pydantic>=2',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'revealib-run=revealib.harness.cli:main',
        ],
    },
    python_requires='>=3.9',
    description='Online learning of hidden utility parameters from revealed, utility-maximizing actions',
)
