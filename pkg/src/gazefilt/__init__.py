"""Signal/noise separation toolkit for 1000 Hz eye-tracking recordings."""

from .config import RunConfig
from .dataio import (DataError, SyntheticKind, SyntheticSpec,
                     generate_synthetic, load_recording, write_recording)
from .filters import (DesignError, DigitalFilter, FilterKind, FilterSpec,
                      FirTapParams, apply_centered, apply_filter,
                      apply_forward, apply_zero_phase,
                      design_butterworth_lowpass, design_fir_lowpass,
                      design_savitzky_golay, estimate_fir_taps, is_stable)
from .kinematics import (Recording, Segment, instantaneous_velocity,
                         select_quiet_segments, sixpoint_velocity,
                         split_blocks)
from .spectral import (AmplitudeSpectrum, FrequencyResponse, ResponseSource,
                       amplitude_spectrum, analytic_frequency_response,
                       detrend_poly2, empirical_frequency_response, fft,
                       find_db_crossing, hanning_window, ifft, to_db)
from .stats import (AcfResult, AcfStudy, FriedmanResult, LagTest,
                    TukeyComparison, acf, fisher_z, friedman_test,
                    run_acf_study, studentized_range_sf, tukey_hsd_on_ranks)

__version__ = "0.1.0"
