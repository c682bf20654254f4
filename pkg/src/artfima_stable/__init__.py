"""Simulation, co-difference analysis and Whittle estimation for ARTFIMA
processes driven by symmetric alpha-stable noise."""

from .codifference import CodiffCurve, asymptotic_constant, theoretical_codifference
from .diagnostics import ljung_box, normalized_sample_acvf, residuals, sample_acf
from .estimation import FitResult, SearchConfig, compute_W, fit_whittle, mcculloch_alpha, whittle_objective
from .exceptions import ArtfimaError
from .kernel import ArmaPoly, ArtfimaParams, TemperedOrder, WeightSeq, ar_coefficients, ma_coefficients, tempered_weights
from .montecarlo import McConfig, McReport, run_mc_study
from .series import SeriesData
from .simulate import simulate_artfima, simulate_with_innovations
from .spectral import Periodogram, alpha_scaled_periodogram, self_normalized_periodogram, transfer_function
from .stable import StableSpec, sample_sas

__version__ = "0.1.0"
