"""Published reference values for the three- and five-body choreographies.

Strings keep every printed digit; compare as floats at the stated tolerance.
Keys are (n, modulus index) with index 1 = smaller m.
"""
import math

MODULI = {
    (3, 1): (2.0 + math.sqrt(3.0)) / 4.0,
    (5, 1): float("0.65366041395477321345"),
    (5, 2): float("0.99764373603161323509"),
}

PERIODS = {
    (5, 1): float("8.0487770522074684844"),
    (5, 2): float("17.654582260596687373"),
}

CONSTANTS = {
    (5, 1): {
        "E": float("0.54804692944384581936"),
        "I1": float("0.26362178303408707110"),
        "I2": float("4.0517817845468308414"),
        "I_HR": float("11.995383205775537457"),
        "T": float("1.0656784451054396"),
        "L": 0.0,
        "J": 0.5,
    },
    (5, 2): {
        "E": float("0.31747900688996754830"),
        "I1": float("30.760801541637359790"),
        "I2": float("12.515257719766335417"),
        "I_HR": float("17.975523091392961251"),
        "T": float("0.35545935316766729"),
        "L": 0.0,
        "J": 0.5,
    },
    (3, 1): {
        "E": 0.25 * math.log(1.5 * math.sqrt(3.0)),
        "I1": 1.5 * math.sqrt(3.0),
        "I2": 3.0 * math.sqrt(3.0),
        "I_HR": 3.0 * math.sqrt(3.0),
        "T": 0.375,
        "L": 0.0,
        "J": 0.5,
    },
}
for _key, _table in CONSTANTS.items():
    _table["curvature_sum"] = 9.0 / _key[0] * _table["I_HR"]

# potential parameters: alpha, a, beta (beta multiplies -sum_all r^2)
POTENTIALS = {
    (5, 1): {"alpha": 0.25, "a": 0.0, "beta": float("0.015366041395477321360")},
    (5, 2): {"alpha": 0.25, "a": 0.0, "beta": float("0.049764373603161323382")},
    # three-body value is quoted as the coefficient of +I_2, i.e. b = -beta
    (3, 1): {"alpha": 0.25, "a": 0.0, "beta": math.sqrt(3.0) / 24.0},
}

# (min, max) of r_12 and r_13 over one period
DISTANCE_EXTREMA = {
    (5, 1): {
        (1, 2): (float("0.68667279299905573944"), float("1.108730495493916550")),
        (1, 3): (float("0.38411684326397186757"), float("1.889145301630350845")),
    },
    (5, 2): {
        (1, 2): (float("0.26636437357508228993"), float("1.7913847571932386574")),
        (1, 3): (float("0.66719007021760872692"), float("1.9952819069627494321")),
    },
}

THREE_BODY_MOMENT_OF_INERTIA = math.sqrt(3.0)
