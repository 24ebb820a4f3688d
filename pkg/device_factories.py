from components.amplifier import AmplifierSpec
from components.comparator import ComparatorSpec
from components.resistor_bank import decade_bank


nominal_bank = decade_bank()

#---------------#
#   AMPLIFIER   #
#---------------#
sc_amplifier = AmplifierSpec()

#----------------#
#   COMPARATOR   #
#----------------#
adc_threshold_comparator = ComparatorSpec()
