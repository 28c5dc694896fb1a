"""Closed sets of options used across the simulator"""

from enum import Enum


class Medium(Enum):
    FIBER_STEP = "fiber_step"
    FIBER_GRADED = "fiber_graded"
    DIFFUSER = "diffuser"
    GRATING = "grating"
    MCF = "mcf"         # multi-core fiber, modelled as a phase screen

    @property
    def is_fiber(self) -> bool:
        return self in (Medium.FIBER_STEP, Medium.FIBER_GRADED)

    @property
    def is_screen(self) -> bool:
        return self in (Medium.DIFFUSER, Medium.MCF)


class Experiment(Enum):
    CORRELATION_SCAN = "correlation_scan"
    INCOHERENT_SUM = "incoherent_sum"
    DEFOCUS_STUDY = "defocus_study"
    PHASE_MATCHING_STUDY = "phase_matching_study"
    WFS = "wfs"
    GRATING_ORDERS = "grating_orders"
    MODE_MIXING = "mode_mixing"


class IndexProfile(Enum):
    STEP = "step"
    GRADED = "graded"   # parabolic core


class Parity(Enum):
    COS = 0
    SIN = 1             # only for l > 0


class Channel(Enum):
    CLASSICAL = "classical"
    SPDC = "spdc"


class ShapingScenario(Enum):
    CLASSICAL = "classical"
    SPDC_SLM_INPUT = "spdc_slm_input"
    SPDC_SLM_OUTPUT = "spdc_slm_output"


class SlmPlane(Enum):
    FIBER_INPUT = "fiber_input"
    FIBER_OUTPUT_ONE_PHOTON = "fiber_output_one_photon"


class MaterialKind(Enum):
    CONSTANT = "constant"
    CAUCHY = "cauchy"


class WavenumberMode(Enum):
    SINGLE = 1          # one photon / classical field
    PAIR = 2            # double pass (k+, k-)
