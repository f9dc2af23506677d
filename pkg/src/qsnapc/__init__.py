"""Direct compilation of qudit unitaries into SNAP and displacement gates."""
from .decompose import (DecompositionPlan, GivensStep, OpCounter, SnapStep,
                        decompose, plan_stats, reconstruct)
from .errors import (FormatError, InsufficientDataError, InvalidArgumentError,
                     InvalidDimensionError, NonUnitaryInputError,
                     NumericalFailureError, QsnapcError, TruncationRiskError,
                     UnsupportedVersionError)
from .fockops import (DisplacementFrame, annihilation, displacement,
                      displacement_frame, fidelity, givens_embed, infidelity,
                      r_pi, snap)
from .synth import (DispGate, GateSequence, SnapGate, SynthesisOptions,
                    expand_givens, merge, phi, sequence_stats, synthesize)
from .targets import TargetSpec, haar_random, qft
from .verify import (SlopeFit, SweepRecord, fit_slope, infidelity_vs_target,
                     simulate, sweep_givens, sweep_qft)

__version__ = "0.1.0"
