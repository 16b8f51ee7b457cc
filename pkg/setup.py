"""A setuptools based setup module.
See:
https://packaging.python.org/en/latest/distributing.html
https://github.com/pypa/sampleproject
"""
from os import path
from setuptools import setup, find_packages

here = path.abspath(path.dirname(__file__))


# *************** Dependencies *********
INSTALL_REQUIRES = ['numpy>=1.17', 'pandas>=1.5', 'click>=7.0', 'mako', 'ordered-set']
DEPENDENCY_LINKS = []
SETUP_REQUIRES = ['pytest-runner', 'setuptools_scm']
TESTS_REQUIRE = ['pytest', 'scipy']
EXTRAS_REQUIRE = {}

# ************** ID card *****************
DISTNAME = 'qtomo'
DESCRIPTION = 'Monte Carlo simulation of weak and projective single-qubit measurements, trajectories and tomography.'
LICENSE = 'BSD 3-Clause'
LICENSE_LONG = 'License :: OSI Approved :: BSD License'
KEYWORDS = 'quantum qubit weak measurement tomography trajectory bloch density matrix monte carlo simulation'

with open(path.join(here, 'docs', 'long_description.md')) as f:
    LONG_DESCRIPTION = f.read()

setup(
    name=DISTNAME,
    description=DESCRIPTION,
    long_description=LONG_DESCRIPTION,
    long_description_content_type='text/markdown',

    # version=VERSION, NOW HANDLED BY GIT

    license=LICENSE,

    # See https://pypi.python.org/pypi?%3Aaction=list_classifiers
    classifiers=[
        'Development Status :: 4 - Beta',

        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',

        LICENSE_LONG,

        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],

    keywords=KEYWORDS,

    packages=find_packages(exclude=['contrib', 'docs', '*tests*']),

    install_requires=INSTALL_REQUIRES,
    dependency_links=DEPENDENCY_LINKS,

    # we're using git. Outside of a git checkout (e.g. a source archive) the fallback version is used.
    use_scm_version={'write_to': '%s/_version.py' % DISTNAME, 'fallback_version': '0.2.0'},
    setup_requires=SETUP_REQUIRES,

    tests_require=TESTS_REQUIRE,

    extras_require=EXTRAS_REQUIRE,

    # the manifest template is loaded at runtime
    # Note: we use the empty string so that this also works with submodules
    package_data={"": ['py.typed', '*.pyi', 'templates/*.mako']},
    # IMPORTANT: DO NOT set the `include_package_data` flag !! It triggers inclusion of all git-versioned files
    # see https://github.com/pypa/setuptools_scm/issues/190#issuecomment-351181286
    # include_package_data=True,

    entry_points={
        'console_scripts': [
            'qtomo=qtomo.cli:main',
        ],
    },

    zip_safe=False,
)
