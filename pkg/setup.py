from setuptools import setup, find_packages

setup(
    name='tld-lite',
    version='1.0.0',
    packages=find_packages(exclude=['tests']),
    py_modules=['solve_kb'],
    python_requires='>=3.8',
    install_requires=[
        'lark',
        'pandas',
        'prefigure',
        'tqdm',
        'wandb',
        'z3-solver',
    ],
    extras_require={
        'test': ['pytest'],
    },
)
