"""
Szego Lab Services Layer
========================
- core/: errors and sign/log-magnitude numbers
- symbols/: matrix-valued symbols, sampling, Fourier series, inverses
- structured/: block Toeplitz / circulant matrices, determinants, Pfaffians, spectra
- asymptotics/: Szego-Widom quantities, modified asymptotics, scalar Wiener-Hopf
- topology/: symmetry classes and zero-mode indices
- zero_modes/: zero-mode scans, power iteration, decay rates
- fixtures/: exactly solvable example symbols with oracles
- diagnostics/: fixture self-check reports
"""

from pathlib import Path

SERVICES_DIR = Path(__file__).parent
