"""Area aggregation node: label-trail FIB and segment stitching.

The ALER aliases every mobile prefix it hears about behind a Local Mobility
Label of its own.  The label trail links that alias to the current
downstream label and the infrastructure LSP toward the binding's origin, so
intra-area movement rewrites one FIB record here instead of updating the
rest of the network.  The FIB is indexed both by prefix (control plane) and
by local label (data plane).
"""

from __future__ import annotations

from dataclasses import dataclass

from .forwarding import INFRA, DataPacket, Label
from .labels import LabelAllocator
from .messages import (
    ControlMessage,
    MessageKind,
    MobilePrefix,
    MobilityBinding,
    UpdateMode,
    UpdatePayload,
    UpdateType,
)


@dataclass
class FibEntry:
    prefix: MobilePrefix
    origin_router_id: str
    in_top_label: int
    local_mobility_label: int
    current_mobility_label: int
    out_top_label: int
    out_interface_id: str
    next_hop: str
    expiry: float
    prev_segment: tuple | None = None  # (cml, out_top, next_hop, keep_until)

    def dump_line(self, name_of) -> str:
        return (f"prefix={self.prefix} origin={self.origin_router_id}"
                f"({name_of(self.origin_router_id)}) in_top={self.in_top_label}"
                f" lml={self.local_mobility_label}"
                f" cml={self.current_mobility_label}"
                f" out_top={self.out_top_label} out_if={self.out_interface_id}")


class AlerNode:
    def __init__(self, rid, name, area, *, amrrs, services,
                 replication=False, replication_window_s=1.0):
        self.rid = rid
        self.name = name
        self.area = area
        self.amrrs = sorted(amrrs)
        self.services = services
        self.replication = replication
        self.replication_window_s = replication_window_s
        self.allocator = LabelAllocator()
        self.fib: dict[str, FibEntry] = {}
        self.by_label: dict[int, FibEntry] = {}

    # ------------------------------------------------------------ control

    def handle_internal_update(self, msg: ControlMessage) -> FibEntry:
        """Binding for a mobile served inside this area, relayed by the AMRR.

        A first-seen prefix gets a Local Mobility Label and is re-originated
        outward (external update, our router id as next hop).  Known
        prefixes only have their trail refreshed; the alias is stable.
        """
        binding = msg.payload.binding
        entry, created = self._upsert(binding)
        if created:
            external = binding.reoriginated(
                origin=self.rid,
                label=entry.local_mobility_label,
                update_type=UpdateType.EXTERNAL,
                update_mode=UpdateMode.SELECTIVE_DOWNSTREAM_PUSH,
            )
            for amrr in self.amrrs:
                self.services.send(MessageKind.BINDING_UPDATE, amrr,
                                   UpdatePayload(external))
        return entry

    def handle_external_update(self, msg: ControlMessage) -> FibEntry:
        """Binding for a mobile in another area; mirror of the internal path:
        new prefixes are aliased and re-announced inward."""
        binding = msg.payload.binding
        entry, created = self._upsert(binding)
        if created:
            internal = binding.reoriginated(
                origin=self.rid,
                label=entry.local_mobility_label,
                update_type=UpdateType.INTERNAL,
                update_mode=UpdateMode.SELECTIVE_DOWNSTREAM_PUSH,
            )
            for amrr in self.amrrs:
                self.services.send(MessageKind.BINDING_UPDATE, amrr,
                                   UpdatePayload(internal))
        return entry

    def _upsert(self, binding: MobilityBinding) -> tuple[FibEntry, bool]:
        key = str(binding.prefix)
        in_top, out_top, next_hop, out_if = self.services.trail_to(
            self.rid, binding.origin_next_hop)
        expiry = self.services.now() + binding.lifetime_s
        entry = self.fib.get(key)
        if entry is not None and self.services.now() > entry.expiry:
            # already dead: a fresh alias must be allocated and re-announced
            self.fib.pop(key, None)
            self.by_label.pop(entry.local_mobility_label, None)
            entry = None
        if entry is None:
            entry = FibEntry(
                prefix=binding.prefix,
                origin_router_id=binding.origin_next_hop,
                in_top_label=in_top,
                local_mobility_label=self.allocator.allocate(),
                current_mobility_label=binding.label,
                out_top_label=out_top,
                out_interface_id=out_if,
                next_hop=next_hop,
                expiry=expiry,
            )
            self.fib[key] = entry
            self.by_label[entry.local_mobility_label] = entry
            self._emit_fib(entry, "created")
            return entry, True
        changed = (entry.origin_router_id != binding.origin_next_hop
                   or entry.current_mobility_label != binding.label)
        if changed and self.replication:
            entry.prev_segment = (entry.current_mobility_label,
                                  entry.out_top_label, entry.next_hop,
                                  self.services.now() + self.replication_window_s)
        entry.origin_router_id = binding.origin_next_hop
        entry.current_mobility_label = binding.label
        entry.in_top_label = in_top
        entry.out_top_label = out_top
        entry.next_hop = next_hop
        entry.out_interface_id = out_if
        entry.expiry = expiry
        if changed:
            self._emit_fib(entry, "updated")
        return entry, False

    def handle_withdrawal(self, msg: ControlMessage):
        key = str(msg.payload.prefix)
        entry = self.fib.pop(key, None)
        if entry:
            self.by_label.pop(entry.local_mobility_label, None)
            self._emit_fib(entry, "withdrawn")

    def apply_failover(self, survivor: str, failed: str):
        """Repoint every trail that terminated at a failed twin ALER."""
        for key in sorted(self.fib):
            entry = self.fib[key]
            if entry.origin_router_id != failed:
                continue
            in_top, out_top, next_hop, out_if = self.services.trail_to(
                self.rid, survivor)
            entry.origin_router_id = survivor
            entry.in_top_label = in_top
            entry.out_top_label = out_top
            entry.next_hop = next_hop
            entry.out_interface_id = out_if
            self._emit_fib(entry, "failover")

    def expire(self, now: float):
        for key in [k for k, e in self.fib.items() if now > e.expiry]:
            entry = self.fib.pop(key)
            self.by_label.pop(entry.local_mobility_label, None)

    # --------------------------------------------------------------- data

    def forward_transit(self, packet: DataPacket):
        """Terminating segment: swap the mobility label through the FIB and
        push the next segment's top label.  The top label was popped by the
        engine before delegation."""
        inner = packet.stack[0]
        entry = self.by_label.get(inner.value)
        if entry is not None and self.services.now() > entry.expiry:
            # lifetime ran out before the periodic sweep collected it
            self.fib.pop(str(entry.prefix), None)
            self.by_label.pop(entry.local_mobility_label, None)
            entry = None
        if entry is None:
            self.services.drop(packet, self.rid, "unknown_local_mobility_label")
            return
        if entry.prev_segment and self.services.now() <= entry.prev_segment[3]:
            prev_cml, prev_top, prev_nh, _ = entry.prev_segment
            twin = packet.replica()
            twin.stack[0].value = prev_cml
            twin.stack.insert(0, Label(prev_top, INFRA))
            self.services.transmit(twin, self.rid, prev_nh)
        inner.value = entry.current_mobility_label
        packet.stack.insert(0, Label(entry.out_top_label, INFRA))
        self.services.transmit(packet, self.rid, entry.next_hop)

    # ---------------------------------------------------------------- misc

    def _emit_fib(self, entry: FibEntry, what: str):
        self.services.emit("fib_update", {
            "what": what,
            "prefix": str(entry.prefix),
            "lml": entry.local_mobility_label,
            "cml": entry.current_mobility_label,
            "origin": entry.origin_router_id,
        })

    def dump(self, name_of) -> list[str]:
        return [self.fib[key].dump_line(name_of) for key in sorted(self.fib)]
