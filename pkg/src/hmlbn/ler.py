"""Edge-node mobility support: registration, movement tracking, on-demand
binding acquisition, label-stack imposition and egress delivery.

A LER owns the registration records for mobiles attached in its regions,
keeps an on-demand binding cache for destinations it sends to, and queues
packets while a binding request is outstanding.  Registration keepalives
and interface tracking are local radio-side events and never produce
control messages.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import NotRegistered, UnknownInterface
from .forwarding import INFRA, MOBILITY, DataPacket, Label
from .labels import LabelAllocator
from .messages import (
    ControlMessage,
    MessageKind,
    MobilePrefix,
    MobilityBinding,
    RequestPayload,
    UpdateMode,
    UpdatePayload,
    UpdateType,
    WithdrawalPayload,
)

DEFAULT_PENDING_QUEUE_LIMIT = 64


@dataclass
class RegistrationRecord:
    prefix: MobilePrefix
    l2_address: str
    interface_id: str
    assigned_label: int
    advertised_area: int
    last_heard: float
    extra_interface: str | None = None  # replication across a move, if enabled
    extra_until: float = 0.0

    def interfaces(self, now: float) -> list[str]:
        out = [self.interface_id]
        if self.extra_interface and now <= self.extra_until:
            out.append(self.extra_interface)
        return out


@dataclass
class _Pending:
    queue: deque = field(default_factory=deque)
    awaiting: set = field(default_factory=set)


class LerNode:
    def __init__(self, rid, name, area, *, amrrs, interfaces, mobility_ranges,
                 dead_time_s, default_lifetime_s, services,
                 queue_limit=DEFAULT_PENDING_QUEUE_LIMIT, replication=False,
                 replication_window_s=1.0):
        self.rid = rid
        self.name = name
        self.area = area
        self.amrrs = sorted(amrrs)
        self.own_interfaces = set(interfaces)
        self.mobility_ranges = mobility_ranges
        self.dead_time_s = dead_time_s
        self.default_lifetime_s = default_lifetime_s
        self.queue_limit = queue_limit
        self.replication = replication
        self.replication_window_s = replication_window_s
        self.services = services
        self.allocator = LabelAllocator()
        self.registrations: dict[str, RegistrationRecord] = {}
        self.regs_by_label: dict[int, RegistrationRecord] = {}
        self.binding_cache: dict[str, tuple[MobilityBinding, float]] = {}
        self.pending: dict[str, _Pending] = {}

    # ------------------------------------------------------------ mobiles

    def handle_registration(self, prefix: MobilePrefix, l2_address: str,
                            interface_id: str, mn_area: int):
        """Register a mobile; returns (record, area id told to the mobile).

        A fresh label is always assigned.  The internal update toward the
        area AMRR carries the mobile's area id unchanged unless the mobile
        presented the start-up value 0, in which case our own area is used.
        """
        if interface_id not in self.own_interfaces:
            raise UnknownInterface(f"{self.name} has no interface {interface_id}")
        now = self.services.now()
        key = str(prefix)
        old = self.registrations.pop(key, None)
        if old:
            self.regs_by_label.pop(old.assigned_label, None)
        label = self.allocator.allocate()
        record = RegistrationRecord(prefix, l2_address, interface_id, label,
                                    self.area, now)
        self.registrations[key] = record
        self.regs_by_label[label] = record
        binding_area = self.area if mn_area == 0 else mn_area
        binding = MobilityBinding(
            prefix=prefix,
            origin_next_hop=self.rid,
            label=label,
            area_id=binding_area,
            update_mode=UpdateMode.SELECTIVE_DOWNSTREAM_PUSH,
            update_type=UpdateType.INTERNAL,
            lifetime_s=self.default_lifetime_s,
        )
        self.services.emit("register", {"prefix": key, "interface": interface_id,
                                        "label": label, "area_sent": binding_area})
        for amrr in self.amrrs:
            self.services.send(MessageKind.BINDING_UPDATE, amrr, UpdatePayload(binding))
        return record, self.area

    def keepalive(self, prefix: MobilePrefix, now: float):
        record = self.registrations.get(str(prefix))
        if record:
            record.last_heard = now

    def track_local_handoff(self, prefix: MobilePrefix, new_interface: str) -> RegistrationRecord:
        """Mobile moved between RAN cells of this same region set: update the
        association only.  Zero control messages by design."""
        record = self.registrations.get(str(prefix))
        if record is None:
            raise NotRegistered(f"{prefix} not registered at {self.name}")
        if new_interface not in self.own_interfaces:
            raise UnknownInterface(f"{self.name} has no interface {new_interface}")
        now = self.services.now()
        if new_interface != record.interface_id:
            if self.replication:
                record.extra_interface = record.interface_id
                record.extra_until = now + self.replication_window_s
            record.interface_id = new_interface
            self.services.emit("local_handoff", {"prefix": str(prefix),
                                                 "interface": new_interface})
        record.last_heard = now
        return record

    def scan_dead_registrations(self, now: float) -> list[ControlMessage]:
        """Withdraw registrations silent for longer than the dead time."""
        out = []
        for key in sorted(self.registrations):
            record = self.registrations[key]
            if now - record.last_heard > self.dead_time_s:
                del self.registrations[key]
                self.regs_by_label.pop(record.assigned_label, None)
                payload = WithdrawalPayload(record.prefix, self.rid)
                for amrr in self.amrrs:
                    out.append(self.services.send(
                        MessageKind.BINDING_WITHDRAWAL, amrr, payload))
        return out

    # --------------------------------------------------------------- data

    def ingress_forward(self, packet: DataPacket):
        dst = packet.dst()
        packet.ingressed = True
        if not dst.covered_by(self.mobility_ranges):
            self.services.drop(packet, self.rid, "non_mobile")
            return
        key = str(dst)
        record = self.registrations.get(key)
        if record is not None:
            self.services.deliver_local(packet, self, record)
            return
        cached = self._cache_lookup(key)
        if cached is not None:
            self._impose_and_send(packet, cached)
            return
        pending = self.pending.get(key)
        if pending is None:
            pending = _Pending(awaiting=set(self.amrrs))
            self.pending[key] = pending
            payload = RequestPayload(dst, self.area)
            for amrr in self.amrrs:
                self.services.send(MessageKind.BINDING_REQUEST, amrr, payload)
        if len(pending.queue) >= self.queue_limit:
            self.services.drop(packet, self.rid, "queue_overflow")
            return
        pending.queue.append(packet)

    def _cache_lookup(self, key: str) -> MobilityBinding | None:
        hit = self.binding_cache.get(key)
        if hit is None:
            return None
        binding, expiry = hit
        if self.services.now() > expiry:
            del self.binding_cache[key]
            return None
        return binding

    def _impose_and_send(self, packet: DataPacket, binding: MobilityBinding):
        if binding.origin_next_hop == self.rid:
            record = self.registrations.get(str(binding.prefix))
            if record is not None:
                self.services.deliver_local(packet, self, record)
            else:
                self.services.drop(packet, self.rid, "no_binding")
            return
        out_label, next_hop = self.services.infra_path(self.rid, binding.origin_next_hop)
        packet.stack = [Label(out_label, INFRA), Label(binding.label, MOBILITY)]
        self.services.transmit(packet, self.rid, next_hop)

    def egress_deliver(self, packet: DataPacket):
        """Terminate a flow: the inner label names a local registration."""
        label = packet.stack.pop(0)
        record = self.regs_by_label.get(label.value)
        if record is None:
            self.services.drop(packet, self.rid, "unknown_mobility_label")
            return
        self.services.deliver_local(packet, self, record)

    # ------------------------------------------------------------ control

    def handle_binding_reply(self, msg: ControlMessage):
        if msg.kind is MessageKind.BINDING_REPLY_POSITIVE:
            binding = msg.payload.binding
            key = str(binding.prefix)
            self._cache_store(binding)
            pending = self.pending.pop(key, None)
            if pending:
                while pending.queue:
                    self._impose_and_send(packet=pending.queue.popleft(),
                                          binding=binding)
            return
        key = str(msg.payload.prefix)
        pending = self.pending.get(key)
        if pending is None:
            return
        pending.awaiting.discard(msg.src)
        if not pending.awaiting:
            del self.pending[key]
            while pending.queue:
                self.services.drop(pending.queue.popleft(), self.rid, "no_binding")

    def handle_unsolicited_update(self, msg: ControlMessage):
        self._cache_store(msg.payload.binding)

    def handle_withdrawal_reflect(self, msg: ControlMessage):
        self.binding_cache.pop(str(msg.payload.prefix), None)

    def _cache_store(self, binding: MobilityBinding):
        expiry = self.services.now() + binding.lifetime_s
        self.binding_cache[str(binding.prefix)] = (binding, expiry)

    def expire_cache(self, now: float):
        for key in [k for k, (_, exp) in self.binding_cache.items() if now > exp]:
            del self.binding_cache[key]
