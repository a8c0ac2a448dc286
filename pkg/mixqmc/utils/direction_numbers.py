"""
Embedded Joe-Kuo direction numbers (new-joe-kuo-6.21201) for dimensions 2..16.

Dimension 1 is implicit (van der Corput). Larger tables are read from the
standard file via --dirs or MIXQMC_DIRECTION_NUMBERS_PATH.
"""

EMBEDDED_DIMENSIONS = 16

JOE_KUO_HEADER = "d       s       a       m_i"

JOE_KUO_RECORDS = """\
2       1       0       1
3       2       1       1 3
4       3       1       1 3 1
5       3       2       1 1 1
6       4       1       1 1 3 3
7       4       4       1 3 5 13
8       5       2       1 1 5 5 17
9       5       4       1 1 5 5 5
10      5       7       1 1 7 11 19
11      5       11      1 1 5 1 1
12      5       13      1 1 1 3 11
13      5       14      1 3 5 5 31
14      6       1       1 3 3 9 7 49
15      6       13      1 1 1 15 21 21
16      6       16      1 3 1 13 27 49
"""

EMBEDDED_TABLE = JOE_KUO_HEADER + "\n" + JOE_KUO_RECORDS
