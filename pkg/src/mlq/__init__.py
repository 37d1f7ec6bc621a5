"""Mittag-Leffler and Wright functions, fractional relaxation and diffusion,
renewal processes and continuous-time random walks."""

__version__ = "0.1.0"

from .errors import (AtomError, CancellationError, ConvergenceError, DiracSpectrumError,
                     DivergenceError, DivergentSeriesWarning, DomainError, MLQError,
                     SeriesDomainError, TruncationError)
from .numerics import DEFAULT_TOL, QuadResult, RngStream, Tolerance
from .mittag_leffler import (EvalResult, Method, MLParams, ml, ml_derivative_k, ml_series,
                             ml_value, rabotnov)
from .relaxation import (RelaxOrder, caputo_derivative, e_alpha, e_alpha_array,
                         e_alpha_spectral, e_approx_long, e_approx_short, phi_alpha,
                         rl_derivative, spectral_density)
from .wright import (DiffusionConfig, GridFunction, WrightParams, f_wright, green_cauchy,
                     green_signalling, m_wright, m_wright_special, solve_cauchy,
                     solve_signalling, wright)
from .renewal import (Exponential, MittagLeffler, PowerLaw, frac_poisson_distribution,
                      frac_poisson_pmf, gen_erlang_cdf, gen_erlang_pdf, simulate_counts)
from .ctrw import (DiracUnit, GridDensity, LaplaceWaitingDensity, Lattice, ctrw_characteristic,
                   ctrw_pdf_series, memory_kernel, rescale_respeed_laplace, simulate_ctrw,
                   thin_laplace, universality_gap)
