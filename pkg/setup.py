from setuptools import setup, find_packages

setup(
    name='biscatter',
    version='0.1.0',
    packages=find_packages('src', exclude=['*test*']),
    package_dir={'': 'src'},
    python_requires='>=3.10',
    install_requires=[
        'attrs',
        'numpy',
        'scipy',
        'ruamel.yaml'
    ],
    extras_require={
        'test': ['hypothesis']
    },
    entry_points={
        'console_scripts': [
            'biscatter=biscatter.__main__:main'
        ]
    },
    description='Pseudospectral workbench comparing cubic NLS and Hartree-NLS under contracting potentials',
    license='MIT',
    keywords='nls hartree split-step pseudospectral convergence-rate',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics'
    ]
)
