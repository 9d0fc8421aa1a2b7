"""Development tool: write the golden-data JSON bundle (transcription of the
published tables) with consistency assertions that catch transcription
errors: printed 1-loop elements must have the printed norms, printed units
must pass unit_test, printed prime generators must have prime-power norms.
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from nzloop.mpnum import PrecisionContext
from nzloop.field import NumberField, norm, unit_test
from nzloop.recognition import element_from_golden, field_tower

OUT = Path(__file__).resolve().parents[1] / "src" / "nzloop" / "data" / "golden"

ctx = PrecisionContext(140)

# ---------------------------------------------------------------------- 4_1
g41 = {
    "knot": "4_1",
    "field": {"min_poly": [1, -1, 1], "root_re": "0.5",
              "root_im": "0.8660254037844386467637231707529361834714026269051903140279034897"},
    "tau1_inv_sq": ["-1", "2"],
    "tau1_inv_sq_norm": "3",
    "norm_tables": {
        "1": [],
        "2": [["3", "1"]],
        "4": [["11", "2"]],
        "5": [["3", "4"], ["29", "2"]],
        "7": [["39733", "2"]],
        "8": [["3", "4"], ["383", "2"]],
        "10": [["19289", "2"]],
    },
    "S2": {
        "1": ["-10/108", "11/108"],
        "2": ["-25/216", "41/216"],
        "3": ["-20/108", "37/108"],
        "4": [["-977/4752", "1855/4752"], ["5/44", "0"]],
        "5": [["-14482/78300", "37559/78300"], ["11/87", "0"],
              ["266/2175", "-22/2175"], ["31/2175", "-22/2175"]],
    },
    "S3": {
        "1": ["-1/54", "0"],
        "2": ["-19/216", "0"],
        "3": ["-401/1944", "0"],
        "4": [["-17783/52272", "0"], ["-347/23232", "694/23232"]],
        "5": [["-1569081/2838375", "48037/2838375"],
              ["-48037/2838375", "96074/2838375"],
              ["-64041/1892250", "64472/1892250"],
              ["-94781/5676750", "-1268/5676750"]],
    },
    "decomp": {
        "2": {
            "epsilon": [["0", "1"]],
            "beta": [{"label": "3", "exponent": "1", "generator": [["-1", "2"]]}],
            "norm_primes": [["3", ""]],
        },
        "4": {
            "epsilon": [["-2", "0"], ["1", "-2"]],
            "beta": [{"label": "11^2", "exponent": "1",
                      "generator": [["1", "0"], ["2", "-4"]]}],
            "norm_primes": [["11", ""]],
        },
        "5": {
            "epsilon": [["3", "2"], ["0", "7"], ["-5", "8"], ["-5", "4"]],
            "beta": [
                {"label": "3^4", "exponent": "1", "generator": [["-1", "2"]]},
                {"label": "29^2", "exponent": "1",
                 "generator": [["-2", "1"], ["0", "-1"], ["-1", "-1"], ["-2", "0"]]},
            ],
            "norm_primes": [["3", ""], ["29", ""]],
        },
        "7": {
            "epsilon": [["-186", "114"], ["-300", "300"], ["-240", "415"],
                        ["-61", "390"], ["90", "239"], ["115", "60"]],
            "beta": [
                {"label": "39733,1", "exponent": "1",
                 "generator": [["-2", "2"], ["-1", "2"], ["-2", "1"],
                               ["-1", "2"], ["-2", "1"], ["0", "1"]]},
                {"label": "39733,2", "exponent": "1",
                 "generator": [["-2", "2"], ["-1", "2"], ["-1", "0"],
                               ["0", "1"], ["-1", "0"], ["0", "1"]]},
            ],
            "norm_primes": [["39733", ""]],
        },
    },
}

# ---------------------------------------------------------------------- 5_2
alpha_52 = ("0.8774388331233463219021887785764387119756128897855329119454",
            "-0.7448617666197442339393983392742418526062576349312258150601")
g52 = {
    "knot": "5_2",
    "field": {"min_poly": [1, 0, -1, 1], "root_re": alpha_52[0], "root_im": alpha_52[1]},
    "tau1_inv_sq": ["-2", "3", "0"],
    "tau1_inv_sq_norm": "-23",
    "norm_tables": {
        "1": [],
        "2": [["11", "1"]],
        "3": [["7", "2"], ["43", "1"]],
        "4": [["21377", "1"]],
        "5": [["9491", "1"], ["1227271", "1"]],
        "6": [["709", "1"], ["2689", "1"]],
        "7": [["43", "2"], ["6007111235971721", "1"]],
    },
    "S2": {
        "1": ["245/2116", "-242/2116", "-33/2116"],
        "2": ["6295/46552", "-10303/46552", "-1314/46552"],
        "3": [["1763029/11464488", "-3730884/11464488", "-616974/11464488"],
              ["727/6923", "40/6923", "-52/6923"]],
    },
    "S3": {
        "1": ["54/24334", "-465/24334", "465/24334"],
        "2": ["-212307/11777656", "-767868/11777656", "959835/11777656"],
        "3": [["-1863760571/59526487818", "-9092540536/59526487818",
               "10659951670/59526487818"],
              ["581674213/29763243909", "-725755840/29763243909",
               "-213728162/29763243909"]],
    },
    "decomp": {
        "2": {
            "epsilon": [["0", "1", "-1"]],
            "beta": [{"label": "11", "exponent": "1",
                      "generator": [["-2", "1", "1"]]}],
            "norm_primes": [["11", ""]],
        },
        "3": {
            "epsilon": [["1", "-1", "-4"], ["4", "2", "-4"]],
            "beta": [
                {"label": "7", "exponent": "2",
                 "generator": [["0", "1", "-1"], ["1", "0", "-1"]]},
                {"label": "43", "exponent": "1",
                 "generator": [["1", "1", "0"], ["2", "0", "0"]]},
            ],
            "norm_primes": [["7", ""], ["43", ""]],
        },
        "7": {
            "epsilon": [
                ["42070901450997", "15742594165404", "-52974788170701"],
                ["53729902713340", "49225269181062", "-29079808246903"],
                ["6470257562608", "18581482784028", "13260713424737"],
                ["15843777055057", "-1263424293533", "-29477571352182"],
                ["58931813581928", "38212176617858", "-52797766935255"],
                ["30382313828818", "40488788528803", "318981244103"],
            ],
            "beta": [
                {"label": "43", "exponent": "2",
                 "generator": [["0", "1", "0"], ["0", "0", "0"], ["0", "1", "0"],
                               ["0", "0", "0"], ["0", "0", "0"], ["-1", "1", "0"]]},
                {"label": "6007111235971721", "exponent": "1",
                 "generator": [["-2", "-2", "6"], ["-5", "1", "2"], ["-6", "5", "3"],
                               ["-8", "1", "8"], ["-3", "4", "5"], ["-7", "6", "4"]]},
            ],
            "norm_primes": [["43", ""], ["6007111235971721", ""]],
        },
    },
    "sample": {
        "k": 7, "ell": 6,
        "x_re": "-235162149.63362564574",
        "x_im": "-40898882.99885002594",
        "x_exact": [
            ["-42626237", "-31168064", "54414583"],
            ["3905252", "-48974302", "103510169"],
            ["91608760", "-23650188", "97210659"],
            ["158817619", "22023535", "44886912"],
            ["149267670", "54779388", "-17355247"],
            ["80916790", "45810663", "-37182537"],
        ],
        "norm_factors": [["43", "14"], ["6007111235971721", "7"]],
    },
}

# ------------------------------------------------------------------ (-2,3,7)
g237 = {
    "knot": "m016",
    "display_name": "(-2,3,7)",
    "field": {"min_poly": [1, 0, -1, 1], "root_re": alpha_52[0], "root_im": alpha_52[1]},
    "tau1_inv_sq": ["-4", "10", "-6"],
    "tau1_inv_sq_norm": "-184",
    "norm_tables": {
        "1": [],
        "2": [["2", "3/2"]],
        "3": [["373", "1"]],
        "4": [["2", "3"], ["373", "1"]],
        "5": [["7121", "1"], ["7951", "1"]],
    },
    "S2": {
        "1": ["-73/25392", "-1524/25392", "-879/25392"],
        "2": ["5213/25392", "-6774/25392", "726/25392"],
    },
    "S3": {
        "1": ["2099/778688", "-2099/778688", "6874/778688"],
        "2": ["-10438/389344", "8532/389344", "-177/389344"],
    },
    "decomp": {
        "2": {
            "epsilon": [["1", "1", "0"]],
            "beta": [{"label": "2^3", "exponent": "1/2",
                      "generator": [["2", "0", "0"]]}],
            "norm_primes": [["2", ""]],
        },
        "3": {
            "epsilon": [["1", "0", "-1"]],
            "beta": [{"label": "373", "exponent": "1",
                      "generator": [["2", "1", "-2"], ["0", "2", "-2"]]}],
            "norm_primes": [["373", ""]],
        },
    },
}

# ---------------------------------------------------------------------- 6_1
g61 = {
    "knot": "6_1",
    "field": {"min_poly": [1, 3, 1, -2, 1],
              "root_re": "1.5041083531852878382166821108625806066532892932083355206233",
              "root_im": "-1.2268504717208047871601879835351374679480329265188306899622"},
    "tau1_inv_sq": ["12", "17", "-17", "7"],
    "tau1_inv_sq_norm": "257",
    "norm_tables": {
        "1": [],
        "2": [["29", "1"]],
        "3": [["79", "1"], ["373", "1"]],
        "4": [["487057", "1"]],
    },
    "S2": {
        "1": ["-178515/1585176", "-946382/1585176", "924836/1585176",
              "-371920/1585176"],
        "2": ["-27011582/45970104", "-51129989/45970104", "48845639/45970104",
              "-19497370/45970104"],
    },
    "S3": {
        "1": ["-2772972/33949186", "-2244430/33949186", "2833463/33949186",
              "-1140832/33949186"],
        "2": ["-32774690022/114205061704", "-17111505319/114205061704",
              "26321905652/114205061704", "-10527251164/114205061704"],
    },
    "decomp": {
        "2": {
            "epsilon": [["-3", "-1", "2", "-1"]],
            "beta": [{"label": "29", "exponent": "1",
                      "generator": [["-7", "-8", "10", "-4"]]}],
            "norm_primes": [["29", ""]],
        },
        "3": {
            "epsilon": [["-8", "-5", "7", "-3"], ["-8", "-9", "10", "-4"]],
            "beta": [
                {"label": "79", "exponent": "1",
                 "generator": [["6", "5", "-7", "3"], ["2", "1", "-2", "1"]]},
                {"label": "373", "exponent": "1",
                 "generator": [["-4", "-7", "7", "-3"], ["-3", "-5", "5", "-2"]]},
            ],
            "norm_primes": [["79", ""], ["373", ""]],
        },
    },
}


def check(golden):
    """Transcription sanity: printed elements have their printed norms/units."""
    name = golden["knot"]
    F = NumberField(golden["field"]["min_poly"],
                    (golden["field"]["root_re"], golden["field"]["root_im"]), name)
    t = element_from_golden([golden["tau1_inv_sq"]], F)
    n = norm(t)
    assert n == Fraction(golden["tau1_inv_sq_norm"]), (name, "tau1 norm", n)
    for ks, dec in golden.get("decomp", {}).items():
        k = int(ks)
        F_k = field_tower(F, k, ctx)
        eps = element_from_golden(dec["epsilon"], F_k)
        assert unit_test(eps), (name, "epsilon not a unit", ks)
        for part in dec["beta"]:
            g = element_from_golden(part["generator"], F_k)
            ng = abs(norm(g))
            # norm must be a prime power matching the label's prime
            p = int(part["label"].split("^")[0].split(",")[0])
            val = ng
            while val % p == 0 and val > 1:
                val //= p
            assert val == 1, (name, "generator norm %s not a power of %d" % (ng, p))
    print("ok:", name)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for golden, fname in ((g41, "4_1"), (g52, "5_2"), (g237, "m016"), (g61, "6_1")):
        check(golden)
        (OUT / ("%s.json" % fname)).write_text(json.dumps(golden, indent=1))
        print("wrote", fname)


if __name__ == "__main__":
    main()
