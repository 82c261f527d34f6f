"""Straight-line RULA worksheet transcription used as an independent
scoring oracle.

Deliberately naive: flat literal tables, one if-chain per joint, no imports
from the package under test. Angle keys are plain channel-label strings.
"""

# Row = (arm-1)*3 + (forearm-1); column = (wrist-1)*2 + (twist-1).
TABLE_A = [
    [1, 2, 2, 2, 2, 3, 3, 3],
    [1, 2, 2, 2, 2, 3, 3, 3],
    [2, 3, 3, 3, 4, 4, 4, 4],
    [2, 3, 3, 3, 3, 4, 4, 4],
    [3, 3, 3, 3, 3, 4, 4, 4],
    [3, 4, 4, 4, 4, 4, 5, 5],
    [3, 3, 4, 4, 4, 4, 5, 5],
    [3, 4, 4, 4, 4, 4, 5, 5],
    [4, 4, 4, 4, 4, 5, 5, 5],
    [4, 4, 4, 4, 4, 5, 5, 5],
    [4, 4, 4, 4, 4, 5, 5, 5],
    [4, 4, 4, 5, 5, 5, 6, 6],
    [5, 5, 5, 5, 5, 6, 6, 7],
    [5, 6, 6, 6, 6, 6, 7, 7],
    [6, 6, 6, 7, 7, 7, 7, 8],
    [7, 7, 7, 7, 7, 8, 8, 9],
    [8, 8, 8, 8, 8, 9, 9, 9],
    [9, 9, 9, 9, 9, 9, 9, 9],
]

# Row = neck-1; column = (trunk-1)*2 + (legs-1).
TABLE_B = [
    [1, 3, 2, 3, 3, 4, 5, 5, 6, 6, 7, 7],
    [2, 3, 2, 3, 4, 5, 5, 5, 6, 7, 7, 7],
    [3, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 7],
    [5, 5, 5, 6, 6, 7, 7, 7, 7, 7, 8, 8],
    [7, 7, 7, 7, 7, 8, 8, 8, 8, 8, 8, 8],
    [8, 8, 8, 8, 8, 8, 8, 9, 9, 9, 9, 9],
]

# Row = score C (1..9), column = score D (1..9), both clamped.
TABLE_C = [
    [1, 2, 3, 3, 4, 5, 5, 5, 5],
    [2, 2, 3, 4, 4, 5, 5, 5, 5],
    [3, 3, 3, 4, 4, 5, 6, 6, 6],
    [3, 3, 3, 4, 5, 6, 6, 6, 6],
    [4, 4, 4, 5, 6, 7, 7, 7, 7],
    [4, 4, 5, 6, 6, 7, 7, 7, 7],
    [5, 5, 6, 6, 7, 7, 7, 7, 7],
    [5, 5, 6, 7, 7, 7, 7, 7, 7],
    [5, 5, 6, 7, 7, 7, 7, 7, 7],
]

BANDS = {1: "negligible", 2: "negligible", 3: "low", 4: "low",
         5: "medium", 6: "medium", 7: "very_high"}


def upper_arm_score(flexion):
    if flexion < -20:
        return 2
    if flexion < 20:
        return 1
    if flexion < 45:
        return 2
    if flexion < 90:
        return 3
    return 4


def forearm_score(elbow_flexion):
    if 60 <= elbow_flexion < 100:
        return 1
    return 2


def wrist_score(flexion):
    if flexion < -15:
        return 3
    if flexion < -1:
        return 2
    if flexion < 1:
        return 1
    if flexion < 15:
        return 2
    return 3


def wrist_twist_score(pro_sup):
    if -45 <= pro_sup < 45:
        return 1
    return 2


def neck_score(flexion):
    if flexion < 0:
        return 4
    if flexion < 10:
        return 1
    if flexion < 20:
        return 2
    return 3


def trunk_score(flexion):
    if flexion < -5:
        return 2
    if flexion < 5:
        return 1
    if flexion < 20:
        return 2
    if flexion < 60:
        return 3
    return 4


def _clamp(value, lo, hi):
    return max(lo, min(hi, value))


def worksheet_score(angles, arm_muscle=0, arm_force=0,
                    neck_muscle=0, neck_force=0, legs=1):
    """Score one frame from a flat dict of the twenty channel values."""
    neck = neck_score(angles["T1_head_neck_FE"])
    if abs(angles["T1_head_neck_AR"]) > 10:
        neck += 1
    if abs(angles["T1_head_neck_LB"]) > 10:
        neck += 1
    neck = _clamp(neck, 1, 6)

    trunk = trunk_score(angles["lumbar_flexion"])
    if abs(angles["lumbar_rotation"]) > 10:
        trunk += 1
    if abs(angles["lumbar_bending"]) > 10:
        trunk += 1
    trunk = _clamp(trunk, 1, 6)

    legs = _clamp(legs, 1, 2)
    b = TABLE_B[neck - 1][(trunk - 1) * 2 + (legs - 1)]
    score_d = b + neck_muscle + neck_force

    result = {"neck": neck, "trunk": trunk, "legs": legs,
              "table_b": b, "score_d": score_d}
    finals = []
    for side in ("l", "r"):
        arm = upper_arm_score(angles[f"arm_flex_{side}"])
        if angles[f"arm_add_{side}"] > 45:
            arm += 1
        arm = _clamp(arm, 1, 6)

        forearm = forearm_score(angles[f"elbow_flex_{side}"])

        wrist = wrist_score(angles[f"wrist_flex_{side}"])
        if abs(angles[f"wrist_dev_{side}"]) > 10:
            wrist += 1
        wrist = _clamp(wrist, 1, 4)

        twist = wrist_twist_score(angles[f"pro_sup_{side}"])

        a = TABLE_A[(arm - 1) * 3 + (forearm - 1)][(wrist - 1) * 2 + (twist - 1)]
        score_c = a + arm_muscle + arm_force
        final = TABLE_C[_clamp(score_c, 1, 9) - 1][_clamp(score_d, 1, 9) - 1]
        result[side] = {"arm": arm, "forearm": forearm, "wrist": wrist,
                        "wrist_twist": twist, "table_a": a,
                        "score_c": score_c, "final": final}
        finals.append(final)

    result["final"] = max(finals)
    result["band"] = BANDS[result["final"]]
    return result
