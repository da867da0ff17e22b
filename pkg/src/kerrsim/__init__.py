"""Cross-Kerr number-squeezing simulator.

Two coherent beams entangled by a weak cross-Kerr interaction, photon loss in
both arms, a noisy binned heterodyne post-selection of the probe, Gaussian
reduction of the conditioned signal, and a dark-count-corrupted click
measurement of g2(0), plus the exotic-state generators (two-peak Fock
superpositions, non-Gaussian Wigner maps, optomechanical enhancement).
"""

__version__ = "0.1.0"

from .branch import (
    BranchState,
    TruncationError,
    apply_cross_kerr,
    fock_cutoff,
    fock_window,
    make_coherent_product,
)
from .channels import (
    SignalDensity,
    apply_probe_loss,
    apply_signal_loss,
    coherent_overlap,
)
from .exotic import (
    TwoPeakResult,
    bayesian_posterior_variance,
    enhancement_factor,
    fock_wigner_grid,
    optomech_overlap,
    phonon_kappa,
    two_peak_amplitudes,
)
from .gaussian import (
    GaussianState,
    ValidityError,
    apply_symplectic,
    attenuate,
    beamsplitter_symplectic,
    coherent,
    displace,
    joint_vacuum_probability,
    moments_from_density,
    reduce_mode,
    rotation_symplectic,
    symplectic_form,
    tensor,
    vacuum,
    wigner_value,
    williamson,
)
from .harness import (
    PipelineResult,
    SweepResult,
    SweepRow,
    compare_gaussian_vs_fock,
    default_delta,
    default_gamma,
    emit,
    estimate_footprint,
    load_json,
    run_pipeline,
    run_pipeline_fock,
    sweep,
)
from .heterodyne import (
    EmptyBinError,
    HeterodyneSettings,
    averaged_projection_kernel,
    envelope_width,
    postselection_probability,
    project_heterodyne,
    project_heterodyne_averaged,
)
from .params import (
    PARAMETER_SETS,
    ConfigError,
    Parameters,
    build_parameters,
    named_parameters,
    parse_config,
)
from .photon_stats import (
    ClickProbabilities,
    DisplacementOptimum,
    click_probabilities,
    g2_at_displacement,
    g2_click,
    g2_click_fock,
    g2_curvature,
    g2_exact,
    optimize_displacement,
    squeezed_axis,
)
