#!/usr/bin/env python3
"""Regenerate the bundled circuit corpus.

Every circuit is written as a plain netlist and passed through the full
stack before landing on disk: parse, validity check, graph build, digest
uniqueness, and an encode/decode round trip.  A circuit that fails any of
those never reaches the package data directory.

Run from the repository root:  python tools/make_corpus.py
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from pinseq.canon import canonical_hash
from pinseq.euler import decode, encode
from pinseq.model import build_graph
from pinseq.netlist import parse_netlist
from pinseq.validity import check_topology

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "pinseq" / "data" / "corpus"


def rc_lowpass(stages: int) -> str:
    lines = []
    prev = "VIN1"
    for k in range(1, stages + 1):
        lines.append(f"R{k} {prev} m{k} 1")
        lines.append(f"C{k} m{k} VSS 1")
        prev = f"m{k}"
    return "\n".join(lines)


def inv_ring(n: int, load: bool) -> str:
    lines = []
    for k in range(1, n + 1):
        a = f"n{k - 1}" if k > 1 else f"n{n}"
        lines.append(f"XINV{k} {a} n{k} VDD VSS INV")
    if load:
        lines.append(f"C1 n1 VSS 1")
    return "\n".join(lines)


def cs_chain(stages: int) -> str:
    lines = ["C1 VIN1 i1 1"]
    caps = 1
    res = 0
    for k in range(1, stages + 1):
        res += 1
        lines.append(f"R{res} VDD i{k} 1")
        res += 1
        lines.append(f"R{res} i{k} VSS 1")
        lines.append(f"MN{k} o{k} i{k} VSS VSS NMOS")
        res += 1
        lines.append(f"R{res} VDD o{k} 1")
        caps += 1
        if k < stages:
            lines.append(f"C{caps} o{k} i{k + 1} 1")
        else:
            lines.append(f"C{caps} o{k} VSS 1")
    return "\n".join(lines)


CIRCUITS: dict[str, str] = {
    # --- amplifiers -------------------------------------------------------
    "amp__cs_diode_load": """
MN1 IIN1 VIN1 VSS VSS NMOS
MP1 IIN1 IIN1 VDD VDD PMOS
""",
    "amp__cmos_inverter_c_load": """
MN1 out VIN1 VSS VSS NMOS
MP1 out VIN1 VDD VDD PMOS
C1 out VSS 1
""",
    "amp__cs_rload": """
MN1 out VIN1 VSS VSS NMOS
R1 VDD out 1
C1 out VSS 1
""",
    "amp__cs_degen": """
MN1 out VIN1 src VSS NMOS
R1 VDD out 1
R2 src VSS 1
C1 out VSS 1
""",
    "amp__source_follower": """
MN1 VDD VIN1 out VSS NMOS
R1 out VSS 1
C1 out VSS 1
""",
    "amp__common_gate": """
MN1 out bias VIN1 VSS NMOS
R1 VDD bias 1
R2 bias VSS 1
R3 VDD out 1
C1 out VSS 1
""",
    "amp__nmos_diffpair_rload": """
MN1 o1 VIN1 tail VSS NMOS
MN2 o2 VIN2 tail VSS NMOS
MN3 tail bias VSS VSS NMOS
MN4 bias bias VSS VSS NMOS
R1 VDD o1 1
R2 VDD o2 1
R3 VDD bias 1
""",
    "amp__five_t_ota": """
MN1 x VIN1 tail VSS NMOS
MN2 out VIN2 tail VSS NMOS
MP1 x x VDD VDD PMOS
MP2 out x VDD VDD PMOS
MN3 tail bias VSS VSS NMOS
MN4 bias bias VSS VSS NMOS
R1 VDD bias 1
C1 out VSS 1
""",
    "amp__two_stage_miller": """
MN1 x VIN1 tail VSS NMOS
MN2 y VIN2 tail VSS NMOS
MP1 x x VDD VDD PMOS
MP2 y x VDD VDD PMOS
MN3 tail bias VSS VSS NMOS
MP3 out y VDD VDD PMOS
MN4 out bias VSS VSS NMOS
MN5 bias bias VSS VSS NMOS
R1 VDD bias 1
R2 y z 1
C1 z out 1
C2 out VSS 1
""",
    "amp__telescopic_cascode": """
MN1 x1 VIN1 tail VSS NMOS
MN2 x2 VIN2 tail VSS NMOS
MN3 y1 cn x1 VSS NMOS
MN4 y2 cn x2 VSS NMOS
MP1 y1 cp z1 VDD PMOS
MP2 y2 cp z2 VDD PMOS
MP3 z1 y1 VDD VDD PMOS
MP4 z2 y1 VDD VDD PMOS
MN5 tail bias VSS VSS NMOS
MN6 bias bias VSS VSS NMOS
R1 VDD bias 1
R2 VDD cn 1
R3 cn cp 1
R4 cp VSS 1
C1 y2 VSS 1
""",
    "amp__folded_cascode": """
MN1 a1 VIN1 tail VSS NMOS
MN2 a2 VIN2 tail VSS NMOS
MN3 tail nb1 VSS VSS NMOS
MP1 a1 pb1 VDD VDD PMOS
MP2 a2 pb1 VDD VDD PMOS
MP3 o1 pb2 a1 VDD PMOS
MP4 out pb2 a2 VDD PMOS
MN4 o1 nb2 c1 VSS NMOS
MN5 out nb2 c2 VSS NMOS
MN6 c1 o1 VSS VSS NMOS
MN7 c2 o1 VSS VSS NMOS
MN8 nb1 nb1 VSS VSS NMOS
R1 VDD nb1 1
R2 VDD nb2 1
R3 nb2 VSS 1
R4 VDD pb1 1
R5 pb1 pb2 1
R6 pb2 VSS 1
C1 out VSS 1
""",
    "amp__inverter_feedback": """
MN1 out in VSS VSS NMOS
MP1 out in VDD VDD PMOS
R1 in out 1
C1 VIN1 in 1
C2 out VSS 1
""",
    "amp__bjt_darlington_ef": """
QN1 VDD VIN1 e1 NPN
QN2 VDD e1 out NPN
R1 out VSS 1
R2 e1 VSS 1
""",
    "amp__pnp_cs": """
QP1 out VIN1 VDD PNP
R1 out VSS 1
C1 out VSS 1
""",
    "opamp__cs_chain5": cs_chain(5),
    # --- current mirrors and bias ----------------------------------------
    "mirror__basic_nmos": """
MN1 IIN1 IIN1 VSS VSS NMOS
MN2 out IIN1 VSS VSS NMOS
R1 VDD out 1
""",
    "mirror__cascode_nmos": """
MN1 IIN1 IIN1 x VSS NMOS
MN2 x x VSS VSS NMOS
MN3 out IIN1 y VSS NMOS
MN4 y x VSS VSS NMOS
R1 VDD out 1
""",
    "mirror__wilson": """
MN1 a b VSS VSS NMOS
MN2 b b VSS VSS NMOS
MN3 out a b VSS NMOS
R1 VDD out 1
R2 IIN1 a 1
""",
    "mirror__wide_swing": """
MN1 IIN1 IIN1 VSS VSS NMOS
MN2 x IIN1 VSS VSS NMOS
MN3 out casc x VSS NMOS
MN4 casc casc VSS VSS NMOS
R1 VDD casc 1
R2 VDD out 1
""",
    "mirror__pmos_fanout3": """
MP1 IIN2 IIN2 VDD VDD PMOS
MP2 o1 IIN2 VDD VDD PMOS
MP3 o2 IIN2 VDD VDD PMOS
MP4 o3 IIN2 VDD VDD PMOS
R1 o1 VSS 1
R2 o2 VSS 1
R3 o3 VSS 1
""",
    "mirror__pnp_basic": """
QP1 IIN1 IIN1 VDD PNP
QP2 out IIN1 VDD PNP
R1 out VSS 1
""",
    "bias__beta_multiplier": """
MN1 n1 n1 VSS VSS NMOS
MN2 n2 n1 nr VSS NMOS
R1 nr VSS 1
MP1 n1 n2 VDD VDD PMOS
MP2 n2 n2 VDD VDD PMOS
""",
    "bias__vt_divider": """
MN1 out out VSS VSS NMOS
MN2 mid mid out VSS NMOS
R1 VDD mid 1
C1 out VSS 1
""",
    # --- bipolar blocks ----------------------------------------------------
    "bjt__mirror_npn": """
QN1 IIN1 IIN1 VSS NPN
QN2 out IIN1 VSS NPN
R1 VDD out 1
""",
    "bjt__diff_amp": """
QN1 o1 VIN1 tail NPN
QN2 o2 VIN2 tail NPN
QN3 tail bias VSS NPN
QN4 bias bias VSS NPN
R1 VDD o1 1
R2 VDD o2 1
R3 VDD bias 1
""",
    "bjt__cascode_cs": """
QN1 x VIN1 VSS NPN
QN2 out bias x NPN
R1 VDD bias 1
R2 bias VSS 1
R3 VDD out 1
C1 out VSS 1
""",
    "bjt__push_pull_ab": """
QN1 VDD in out NPN
QP1 VSS in2 out PNP
D1 in in2 D
R1 VDD in 1
R2 in2 VSS 1
R3 out VSS 1
C1 VIN1 in 1
""",
    "bandgap__ptat_core": """
MP1 n1 n1 VDD VDD PMOS
MP2 n2 n1 VDD VDD PMOS
QN1 n1 n2 VSS NPN
QN2 n2 n2 er NPN
R1 er VSS 1
R2 n2 VSS 1
""",
    "bandgap__brokaw_core": """
QN1 c1 vb x NPN
QN2 c2 vb y NPN
R1 x y 1
R2 y VSS 1
MP1 c1 c1 VDD VDD PMOS
MP2 c2 c1 VDD VDD PMOS
R3 c2 vb 1
R4 vb VSS 1
""",
    # --- regulators and comparators ---------------------------------------
    "ldo__pmos_pass": """
MN1 a fb tail VSS NMOS
MN2 b ref tail VSS NMOS
MP1 a a VDD VDD PMOS
MP2 b a VDD VDD PMOS
MN3 tail nb VSS VSS NMOS
MN4 nb nb VSS VSS NMOS
R1 VDD nb 1
MP3 out b VDD VDD PMOS
R2 out fb 1
R3 fb VSS 1
C1 out VSS 1
R4 VDD ref 1
R5 ref VSS 1
""",
    "comp__latch": """
MN1 q VIN1 tail VSS NMOS
MN2 qb VIN2 tail VSS NMOS
MN3 q qb VSS VSS NMOS
MN4 qb q VSS VSS NMOS
MP1 q qb VDD VDD PMOS
MP2 qb q VDD VDD PMOS
MN5 tail bias VSS VSS NMOS
MN6 bias bias VSS VSS NMOS
R1 VDD bias 1
""",
    "comp__hysteresis": """
MN1 a fb tail VSS NMOS
MN2 b VIN1 tail VSS NMOS
MP1 a a VDD VDD PMOS
MP2 b a VDD VDD PMOS
MN3 tail nb VSS VSS NMOS
MN4 nb nb VSS VSS NMOS
R1 VDD nb 1
R2 b fb 1
R3 fb VSS 1
""",
    # --- oscillators --------------------------------------------------------
    "osc__cross_coupled_lc": """
MN1 t1 t2 tail VSS NMOS
MN2 t2 t1 tail VSS NMOS
L1 VDD t1 1
L2 VDD t2 1
C1 t1 t2 1
MN3 tail bias VSS VSS NMOS
MN4 bias bias VSS VSS NMOS
R1 VDD bias 1
""",
    "osc__colpitts": """
QN1 col base em NPN
R1 VDD base 1
R2 base VSS 1
R3 em VSS 1
L1 VDD col 1
C1 col em 1
C2 em VSS 1
""",
    "osc__ring3_loaded": inv_ring(3, load=True),
    "osc__ring5": inv_ring(5, load=False),
    "osc__ring7": inv_ring(7, load=False),
    "osc__rc_phase_shift": """
MN1 out g VSS VSS NMOS
R1 VDD out 1
C1 out p1 1
R2 p1 VSS 1
C2 p1 p2 1
R3 p2 VSS 1
C3 p2 g 1
R4 g VSS 1
""",
    # --- logic cells and switches ------------------------------------------
    "logic__xor_phase_det": """
XXOR1 VIN1 VIN2 VDD VSS pd XOR
R1 pd out 1
C1 out VSS 1
""",
    "logic__xor_chain": """
XXOR1 VIN1 VIN2 VDD VSS x1 XOR
XXOR2 x1 VIN3 VDD VSS x2 XOR
R1 x2 VSS 1
""",
    "logic__inv_buffer_chain4": """
XINV1 VIN1 b1 VDD VSS INV
XINV2 b1 b2 VDD VSS INV
XINV3 b2 b3 VDD VSS INV
XINV4 b3 b4 VDD VSS INV
C1 b4 VSS 1
""",
    "logic__tg_mux2": """
XINV1 VIN3 selb VDD VSS INV
XTG1 VIN1 muxo VIN3 VDD VSS TG
XTG2 VIN2 muxo selb VDD VSS TG
C1 muxo VSS 1
""",
    "logic__qb_readout": """
XINV1 LOGICQB1 rb1 VDD VSS INV
XINV2 LOGICQB2 rb2 VDD VSS INV
XXOR1 rb1 rb2 VDD VSS mis XOR
R1 mis VSS 1
""",
    "sha__tg_track_hold": """
XTG1 VIN1 hold VIN2 VDD VSS TG
C1 hold VSS 1
R1 hold VSS 1
""",
    "sha__tg_pingpong": """
XINV1 VIN3 ckb VDD VSS INV
XTG1 VIN1 s1 VIN3 VDD VSS TG
XTG2 VIN1 s2 ckb VDD VSS TG
C1 s1 VSS 1
C2 s2 VSS 1
""",
    "samp__sc_branch": """
XTG1 VIN1 top VIN3 VDD VSS TG
C1 top sum 1
XTG2 sum out VIN4 VDD VSS TG
C2 out VSS 1
R1 sum VSS 1
""",
    # --- passive filters -----------------------------------------------------
    "filter__rc_lp1": rc_lowpass(1),
    "filter__rc_lp2": rc_lowpass(2),
    "filter__rc_lp3": rc_lowpass(3),
    "filter__rc_lp4": rc_lowpass(4),
    "filter__rc_lp5": rc_lowpass(5),
    "filter__rc_hp2": """
C1 VIN1 m1 1
R1 m1 VSS 1
C2 m1 m2 1
R2 m2 VSS 1
""",
    "filter__rlc_series": """
R1 VIN1 a 1
L1 a b 1
C1 b VSS 1
""",
    "filter__lc_pi": """
C1 VIN1 VSS 1
L1 VIN1 out 1
C2 out VSS 1
R1 out VSS 1
""",
    "filter__twin_t": """
R1 VIN1 a 1
R2 a out 1
C1 a VSS 1
C2 VIN1 b 1
C3 b out 1
R3 b VSS 1
R4 out VSS 1
""",
    "dac__r_ladder": """
R1 VIN1 n1 1
R2 VIN2 n2 1
R3 n1 n2 1
R4 n2 out 1
R5 out VSS 1
C1 out VSS 1
""",
    # --- rectifiers, references, protection ---------------------------------
    "rect__halfwave": """
D1 VIN1 out D
C1 out VSS 1
R1 out VSS 1
""",
    "rect__fullwave_bridge": """
D1 VIN1 op D
D2 VIN2 op D
D3 VSS VIN1 D
D4 VSS VIN2 D
R1 op VSS 1
C1 op VSS 1
""",
    "rect__doubler": """
C1 VIN1 a 1
D1 VSS a D
D2 a out D
C2 out VSS 1
R1 out VSS 1
""",
    "rect__clamp": """
C1 VIN1 out 1
D1 VSS out D
R1 out VSS 1
""",
    "ref__diode_string3": """
R1 VDD a 1
D1 a b D
D2 b c D
D3 c VSS D
C1 a VSS 1
""",
    "esd__dual_diode": """
R1 VIN1 pad 1
D1 pad VDD D
D2 VSS pad D
C1 pad VSS 1
""",
    # --- RF and power ----------------------------------------------------------
    "pa__class_a": """
L1 VDD out 1
C1 VIN1 g 1
R1 VDD g 1
R2 g VSS 1
MN1 out g VSS VSS NMOS
C2 out load 1
R3 load VSS 1
""",
    "lna__cascode_inductive": """
L1 VIN1 g 1
MN1 x g s VSS NMOS
L2 s VSS 1
MN2 out casc x VSS NMOS
R1 VDD casc 1
R2 casc VSS 1
L3 VDD out 1
C1 out VSS 1
""",
    "mix__single_balanced": """
MN1 cm VIN1 VSS VSS NMOS
MN2 o1 VIN2 cm VSS NMOS
MN3 o2 VIN3 cm VSS NMOS
R1 VDD o1 1
R2 VDD o2 1
C1 o1 o2 1
""",
    "conv__buck_cell": """
MP1 sw VIN1 VDD VDD PMOS
D1 VSS sw D
L1 sw out 1
C1 out VSS 1
R1 out VSS 1
""",
    "conv__boost_cell": """
L1 VDD sw 1
MN1 sw VIN2 VSS VSS NMOS
D1 sw out D
C1 out VSS 1
R1 out VSS 1
""",
    "conv__charge_pump2": """
C1 VIN1 a 1
D1 VDD a D
D2 a b D
C2 b VIN2 1
D3 b out D
C3 out VSS 1
R1 out VSS 1
""",
}


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for stale in OUT_DIR.glob("*.ckt"):
        stale.unlink()
    hashes: dict[str, str] = {}
    kinds: set[str] = set()
    largest = (0, "")
    for name, body in sorted(CIRCUITS.items()):
        text = f"* {name}\n" + body.strip() + "\n.end\n"
        t = parse_netlist(text)
        report = check_topology(t)
        assert report.is_valid, f"{name}: {[str(v) for v in report.violations]}"
        g = build_graph(t)
        h = canonical_hash(g)
        assert h not in hashes, f"{name} duplicates {hashes[h]}"
        hashes[h] = name
        s = encode(g, 0)
        assert decode(s) == g, f"{name}: round trip failed"
        kinds.update(d.kind.name for d in t.devices)
        if len(t.devices) > largest[0]:
            largest = (len(t.devices), name)
        (OUT_DIR / f"{name}.ckt").write_text(text, encoding="utf-8")
    print(f"wrote {len(CIRCUITS)} circuits to {OUT_DIR}")
    print(f"kinds covered: {sorted(kinds)}")
    print(f"largest: {largest[1]} with {largest[0]} devices")


if __name__ == "__main__":
    main()
