"""Published reference values.  Frequency tables are digit rows 1..9, columns in
column-major component order (1,1), (2,1), (3,1), (1,2), ..., (3,3)."""


def _table(text):
    return [[float(v) for v in line.split()] for line in text.strip().splitlines()]


FAST_MIXING_N1000 = _table("""
0.300 0.301 0.300 0.303 0.303 0.299 0.300 0.306 0.300
0.175 0.177 0.177 0.176 0.174 0.176 0.178 0.174 0.175
0.126 0.124 0.123 0.125 0.125 0.125 0.124 0.124 0.127
0.098 0.096 0.100 0.096 0.096 0.097 0.096 0.098 0.097
0.078 0.081 0.079 0.080 0.080 0.079 0.079 0.078 0.077
0.068 0.067 0.065 0.068 0.067 0.066 0.068 0.067 0.069
0.058 0.059 0.059 0.056 0.057 0.060 0.059 0.057 0.058
0.050 0.050 0.051 0.051 0.052 0.052 0.050 0.050 0.052
0.047 0.045 0.046 0.045 0.046 0.046 0.046 0.046 0.045
""")

FAST_MIXING_N10000 = _table("""
0.3008 0.3009 0.3009 0.3011 0.3012 0.3008 0.3011 0.3017 0.3010
0.1761 0.1762 0.1764 0.1762 0.1758 0.1762 0.1763 0.1759 0.1760
0.1249 0.1250 0.1247 0.1248 0.1251 0.1249 0.1249 0.1249 0.1250
0.0971 0.0968 0.0972 0.0969 0.0968 0.0970 0.0968 0.0969 0.0970
0.0792 0.0793 0.0791 0.0792 0.0793 0.0790 0.0790 0.0790 0.0789
0.0668 0.0669 0.0666 0.0670 0.0670 0.0668 0.0672 0.0671 0.0673
0.0582 0.0582 0.0582 0.0580 0.0578 0.0582 0.0580 0.0577 0.0579
0.0510 0.0509 0.0512 0.0510 0.0512 0.0514 0.0510 0.0512 0.0513
0.0459 0.0458 0.0457 0.0458 0.0458 0.0457 0.0457 0.0456 0.0456
""")

SLOW_MIXING_N1000 = _table("""
0.302 0.313 0.311 0.327 0.290 0.286 0.293 0.298 0.297
0.176 0.169 0.170 0.152 0.178 0.181 0.192 0.181 0.184
0.127 0.137 0.136 0.137 0.110 0.114 0.103 0.122 0.122
0.096 0.081 0.085 0.087 0.101 0.101 0.123 0.105 0.102
0.075 0.079 0.080 0.086 0.093 0.091 0.061 0.071 0.074
0.074 0.080 0.084 0.072 0.055 0.056 0.061 0.063 0.069
0.072 0.049 0.048 0.046 0.055 0.054 0.061 0.083 0.074
0.039 0.047 0.043 0.046 0.056 0.055 0.070 0.038 0.041
0.039 0.045 0.043 0.047 0.062 0.062 0.036 0.039 0.037
""")

SLOW_MIXING_N10000 = _table("""
0.2998 0.3150 0.3158 0.3167 0.2910 0.2922 0.2938 0.2982 0.2981
0.1798 0.1620 0.1610 0.1570 0.1865 0.1867 0.1877 0.1816 0.1821
0.1312 0.1397 0.1399 0.1354 0.1069 0.1079 0.1090 0.1232 0.1236
0.0943 0.0828 0.0837 0.0859 0.1002 0.0983 0.1192 0.1033 0.1027
0.0716 0.0825 0.0825 0.0965 0.0877 0.0887 0.0640 0.0702 0.0698
0.0753 0.0789 0.0782 0.0610 0.0570 0.0561 0.0600 0.0682 0.0694
0.0665 0.0476 0.0478 0.0496 0.0550 0.0546 0.0618 0.0748 0.0741
0.0416 0.0458 0.0462 0.0478 0.0575 0.0570 0.0680 0.0412 0.0409
0.0399 0.0457 0.0449 0.0501 0.0582 0.0585 0.0365 0.0393 0.0393
""")

# first-digit frequencies of the first 1000 terms, digits 1..9
CLASSIC_N1000 = {
    "2^n": [0.292, 0.180, 0.126, 0.098, 0.081, 0.068, 0.057, 0.053, 0.045],
    "n!": [0.293, 0.176, 0.124, 0.102, 0.087, 0.069, 0.051, 0.051, 0.047],
    "F_n": [0.301, 0.176, 0.126, 0.096, 0.079, 0.067, 0.057, 0.053, 0.045],
}

# a_0, a_1, ..., a_50
FAST_LOG_MODULUS = [-1, 2, 4, 8, 1, 5, 1, 6, 3, 1, 2, 2, 1, 1, 2, 1, 1, 2, 1, 66, 5, 1, 1, 2, 1, 3, 1, 2, 1, 1, 3,
                    1, 3, 2, 3, 2, 7, 3, 86, 1, 1, 1, 1, 1, 26, 3, 1, 5, 3, 1, 5]
SLOW_LOG_MODULUS = [-1, 1, 1, 3, 1, 7, 1, 15, 1, 2, 1, 1, 7, 1, 6, 2, 1, 3, 1, 1, 2, 4, 1, 1, 2, 3, 8, 1, 2, 1, 1,
                    2, 1, 2, 1, 7, 1, 1, 2, 1, 33, 1, 2, 1, 2, 1, 1, 11, 1, 24, 8]
SLOW_ARGUMENT = [0, 25, 1, 9, 3, 168, 2, 1, 1, 32, 1, 6, 3, 1, 9, 1, 1, 92, 2, 13, 2, 1, 1, 10, 2, 5, 1, 3, 1, 1,
                 1, 1, 3, 1, 2, 7, 1, 5, 1, 1, 4, 1, 3, 14, 3, 10, 1, 1, 3, 1, 3]
