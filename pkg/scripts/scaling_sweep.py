#!/usr/bin/env python3
"""Hand-off message cost as uninvolved areas are added.

Prints, for 3..10 areas, the control messages caused by one intra-area
hand-off and by one inter-area hand-off, plus which AMRRs the latter
touches.  The intra-area cost must not change at all.
"""

from hmlbn.scenario import parse_scenario
from hmlbn.scenarios import scaling_inter_scenario, scaling_intra_scenario
from hmlbn.simulator import run_scenario


def handoff_messages(sim, t_move):
    return [e for e in sim.trace
            if e["kind"] == "ctl_send" and e["t"] >= t_move]


def main():
    print("areas  intra_msgs  inter_msgs  inter_amrrs_touched")
    for n in range(3, 11):
        intra = run_scenario(parse_scenario(scaling_intra_scenario(n)))
        inter = run_scenario(parse_scenario(scaling_inter_scenario(n)))
        intra_msgs = handoff_messages(intra, 0.2)
        inter_msgs = handoff_messages(inter, 0.2)
        touched = sorted({e[k] for e in inter_msgs for k in ("src", "dst")
                          if e[k] and e[k].startswith("AMRR")})
        print(f"{n:5d}  {len(intra_msgs):10d}  {len(inter_msgs):10d}  "
              f"{','.join(touched)}")


if __name__ == "__main__":
    main()
