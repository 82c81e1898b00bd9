from .tf import TransferFunction, dc_gain, freq_response_at, make_tf, poles
from .ss import StateSpace, tf_to_ss
from .signals import ChirpSpec, chirp_phase, chirp_rate, chirp_value
from .trace import Trace
from .integrate import check_step, integrate
from .frf import FrequencyResponse, bandwidth_3db, fundamental_phasor, measure_frf, sine_runner

__all__ = [
    "TransferFunction", "make_tf", "freq_response_at", "poles", "dc_gain",
    "StateSpace", "tf_to_ss",
    "ChirpSpec", "chirp_value", "chirp_rate", "chirp_phase",
    "Trace", "integrate", "check_step",
    "FrequencyResponse", "measure_frf", "bandwidth_3db", "fundamental_phasor",
    "sine_runner",
]
