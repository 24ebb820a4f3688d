"""Default values of the read-out chain, in SI units."""

TOOL_VERSION = "1.0.0"

BANK_SIZE = 5

# Memristor validity window (siemens)
MIN_CONDUCTANCE = 1e-9
MAX_CONDUCTANCE = 1e-1

v_read = 0.2

# Base resistance back-solved from the single read-out trace: 5.641 uV / 355.66 nA
base_resistance = 15.86
ladder_tolerance = 0.20

threshold_voltage = 0.7
overdrive = 3.5 # bank runs from the 5 V supply
gate_voltage = threshold_voltage + overdrive

amplifier_gain = 34.0
common_mode = 0.05654
clip_low = 0.0
clip_high = 1.8 # core supply

comparator_threshold = 0.1573

adc_bits = 12
adc_v_lo = 0.1
adc_v_hi = 1.7
adc_v_ref = adc_v_hi - adc_v_lo
unit_capacitance = 30e-15

# 3.75 us per selector cycle and 1.25 us per conversion: 1 cycle -> 200 kHz, 5 -> 50 kHz
selector_clock = 4e6 / 15
sar_clock = 9.6e6
adc_sampling = 250e3

# Node solver
SOLVER_TOLERANCE = 1e-15 # amperes
SOLVER_STEP_TOLERANCE = 1e-14 # relative
SOLVER_MAX_ITERATIONS = 100
SOLVER_DAMPING = 0.8

# Transition-voltage search
TRANSITION_RESOLUTION = 2.0 ** -10 # LSB
TRANSITION_OFFSET = 1.0 / 3.0 # LSB, keeps bisection midpoints off ideal code edges

MISMATCH_RETRIES = 16

# Monte-Carlo defaults, tuned for ~20 % v_out spread
mc_trials = 1000
mc_resistor_sigma = 0.22
mc_gain_sigma = 0.08
mc_vcm_sigma = 0.005
mc_capacitor_sigma = 0.002

# Window the autoranged bottom voltage is expected to stay in
lock_window = (2.9e-3, 36e-3)

# Bottom voltages that bound the autoranged linearity loss
linearity_envelope = (3e-3, 35e-3)
