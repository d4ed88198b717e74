"""qgelab: a verification laboratory for quaternionic Gaussian spectra.

Samples quaternionic random matrix ensembles, computes spectra,
eigenvector chains and overlap matrices, evaluates the exact Pfaffian
formulas for product statistics, and cross-checks every distributional
identity three ways: Monte Carlo sampling, exact Pfaffian evaluation, and
independent-variable representations.
"""

from .quat import (Quaternion, QuaternionMatrix, ConjugacyClass,
                   StructureViolation, quat_mul, conjugacy_class, embed,
                   extract_quaternionic)
from .linalg import (EigenSystem, NoConvergence, NearDefective, Singular,
                     PairingFailure, eigen_full, frobenius_norm, invert,
                     solve, pair_conjugates)
from .pfaffian import (MixedPolynomial, RadialPolynomial, MomentMatrix,
                       pfaffian, pfaffian_naive, gaussian_mixed_moment,
                       moment_matrix, product_statistic, product_statistic_log,
                       debruijn_lhs_bruteforce, debruijn_rhs)
from .ensembles import (EnsembleConfig, SpectrumPairs, SchurForm, trial_rng,
                        sample_ginibre, sample_schur, sample_truncated_unitary,
                        sample_product, sample_spherical, sample_matrix,
                        spectrum, spectra_batch)
from .laws import (GammaVSpec, LawSpec, ExperimentReport, make_rng,
                   gamma_sample, beta_sample, gamma_v_sample, gamma_v_pdf,
                   gamma_v_cdf, kostlan_reference, highpowers_reference,
                   radii_reference, overlap_reference, angle_reference,
                   joint_density_eval, log_joint_density, ks_statistic,
                   ks_two_sample, phi_disk)
from .spectra import (CoefficientChain, OverlapMatrix, DegenerateSpectrum,
                      phi_map, coefficient_chains, left_chain, angle,
                      overlap_matrix, diagonal_overlap_recurrence,
                      lack_of_normality, quadratic_form_check)

__version__ = "0.1.0"
