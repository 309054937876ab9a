"""Area control-plane hub: binding store, area-id logic, requestor lists,
on-demand resolution, withdrawal scoping and ALER fail-over.

The AMRR is a route reflector with deliberately non-standard behavior: it
stores client bindings instead of flooding them, reflects automatically
only toward the area's ALER nodes, and answers everyone else on demand.
Its record for a prefix tracks which area currently owns the mobile, the
local ALER aliases for it, and who asked (external areas and internal
LERs) so later withdrawals and hand-off updates touch exactly those nodes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from .errors import NoAlerAvailable
from .messages import (
    ControlMessage,
    FailoverBlanketPayload,
    LastRequestorList,
    LrlReplyPayload,
    LrlRequestPayload,
    MessageKind,
    MobilePrefix,
    MobilityBinding,
    NegativeReplyPayload,
    RequestPayload,
    UpdateMode,
    UpdatePayload,
    UpdateType,
    WithdrawalPayload,
)


@dataclass
class AmrrRecord:
    prefix: MobilePrefix
    binding: MobilityBinding  # last truth update (LER internal or peer external)
    area_id: int
    lrl: LastRequestorList = field(default_factory=LastRequestorList)
    aler_labels: dict = field(default_factory=dict)  # ALER rid -> its local label
    resolved_local: MobilityBinding | None = None  # local-ALER alias, foreign mobiles
    expiry: float = 0.0
    pending_lrl_target: int | None = None

    def dump_line(self, name_of) -> str:
        alers = ",".join(name_of(a) for a in sorted(self.aler_labels)) or "-"
        elrl = ",".join(str(a) for a in self.lrl.external) or "-"
        ilrl = ",".join(name_of(r) for r in self.lrl.internal) or "-"
        return (f"prefix={self.prefix} area={self.area_id}"
                f" origin={name_of(self.binding.origin_next_hop)}"
                f" label={self.binding.label} alers={alers}"
                f" elrl={elrl} ilrl={ilrl} expiry={self.expiry:.3f}")


@dataclass
class _PendingRequest:
    lers: list = field(default_factory=list)
    awaiting: set = field(default_factory=set)
    resolved: bool = False


class AmrrNode:
    def __init__(self, rid, name, area, *, peers, ler_clients, aler_clients,
                 amrrs_by_area, ha_twin, services, reflect_to_previous=False):
        self.rid = rid
        self.name = name
        self.area = area
        self.peers = sorted(peers)
        self.ler_clients = set(ler_clients)
        self.aler_clients = sorted(aler_clients)
        self.amrrs_by_area = {a: sorted(v) for a, v in amrrs_by_area.items()}
        self.ha_twin = dict(ha_twin)  # ALER rid -> its high-availability twin
        self.services = services
        self.reflect_to_previous = reflect_to_previous
        self.records: dict[str, AmrrRecord] = {}
        self.pending: dict[str, _PendingRequest] = {}
        self.rr_counter = 0
        self.failed_alers: set[str] = set()

    def _live_record(self, key: str) -> AmrrRecord | None:
        """Read-side record lookup; state past its lifetime is already dead
        even if the periodic sweep has not collected it yet."""
        rec = self.records.get(key)
        if rec is not None and self.services.now() > rec.expiry:
            del self.records[key]
            return None
        return rec

    # ----------------------------------------------------------- updates

    def handle_update(self, msg: ControlMessage):
        binding = msg.payload.binding
        if msg.src in self.ler_clients:
            self._internal_from_ler(binding, msg.src)
        elif msg.src in self.aler_clients:
            if binding.update_type is UpdateType.EXTERNAL:
                self._external_from_aler(binding, msg.src)
            else:
                self._internal_from_aler(binding, msg.src)
        else:
            self._external_from_peer(binding, msg.src)

    def _internal_from_ler(self, binding: MobilityBinding, sender: str):
        """Area-id check: own-area bindings are stored and reflected to the
        ALERs only; a foreign area id additionally starts the requestor-list
        exchange with that area's AMRR and is rewritten to our own."""
        now = self.services.now()
        key = str(binding.prefix)
        rec = self._live_record(key)
        previous_origin = None
        target_area = None
        if rec is not None and rec.area_id == self.area:
            previous_origin = rec.binding.origin_next_hop
        if binding.area_id == self.area:
            stored = binding
        else:
            target_area = binding.area_id
            stored = dataclasses.replace(binding, area_id=self.area)
            if target_area not in self.amrrs_by_area:
                self.services.emit("warn", {"what": "unknown_peer_area",
                                            "prefix": key, "area": target_area})
                target_area = None
        if rec is None:
            rec = AmrrRecord(binding.prefix, stored, self.area)
            self.records[key] = rec
        else:
            rec.binding = stored
            rec.area_id = self.area
        rec.expiry = now + binding.lifetime_s
        self._reflect_to_alers(stored, UpdateType.INTERNAL)
        if (self.reflect_to_previous and previous_origin
                and previous_origin != binding.origin_next_hop
                and previous_origin in self.ler_clients):
            reflected = dataclasses.replace(
                stored, update_mode=UpdateMode.UNSOLICITED_DOWNSTREAM_PUSH)
            self.services.send(MessageKind.BINDING_UPDATE, previous_origin,
                               UpdatePayload(reflected))
        if binding.area_id != self.area and target_area is not None:
            if rec.aler_labels:
                self._send_lrl_exchange(rec, target_area)
            else:
                rec.pending_lrl_target = target_area

    def _external_from_aler(self, binding: MobilityBinding, sender: str):
        key = str(binding.prefix)
        rec = self.records.get(key)
        if rec is None:
            self.services.emit("warn", {"what": "external_before_internal",
                                        "prefix": key, "from": sender})
            rec = AmrrRecord(binding.prefix, binding, binding.area_id)
            self.records[key] = rec
        rec.aler_labels[sender] = binding.label
        rec.area_id = binding.area_id  # stored as received, no area-id check
        rec.expiry = self.services.now() + binding.lifetime_s
        if rec.pending_lrl_target is not None:
            target = rec.pending_lrl_target
            rec.pending_lrl_target = None
            self._send_lrl_exchange(rec, target)

    def _internal_from_aler(self, binding: MobilityBinding, sender: str):
        """An ALER re-announced an outside mobile inward; answer any LER
        requests that were parked on the resolution."""
        key = str(binding.prefix)
        rec = self.records.get(key)
        if rec is None:
            self.services.emit("warn", {"what": "internal_before_record",
                                        "prefix": key, "from": sender})
            rec = AmrrRecord(binding.prefix, binding, binding.area_id)
            self.records[key] = rec
        rec.resolved_local = binding
        rec.aler_labels.setdefault(sender, binding.label)
        rec.expiry = self.services.now() + binding.lifetime_s
        pending = self.pending.pop(key, None)
        if pending:
            for ler in pending.lers:
                rec.lrl.add_internal(ler)
                self.services.send(MessageKind.BINDING_REPLY_POSITIVE, ler,
                                   UpdatePayload(binding))

    def _external_from_peer(self, binding: MobilityBinding, sender: str):
        key = str(binding.prefix)
        rec = self.records.get(key)
        if rec is None:
            rec = AmrrRecord(binding.prefix, binding, binding.area_id)
            self.records[key] = rec
        else:
            rec.binding = binding
            rec.area_id = binding.area_id
        rec.expiry = self.services.now() + binding.lifetime_s
        self._reflect_to_alers(binding, UpdateType.EXTERNAL)

    def _reflect_to_alers(self, binding: MobilityBinding, update_type: UpdateType):
        reflected = dataclasses.replace(
            binding, update_type=update_type,
            update_mode=UpdateMode.UNSOLICITED_DOWNSTREAM_PUSH)
        for aler in self._live_alers():
            self.services.send(MessageKind.BINDING_UPDATE, aler,
                               UpdatePayload(reflected))

    # ---------------------------------------------------------- requests

    def handle_request(self, msg: ControlMessage):
        prefix = msg.payload.prefix
        key = str(prefix)
        rec = self._live_record(key)
        if msg.src not in self.ler_clients:
            # peer area asks: positive only while the mobile is ours, and
            # only through a live ALER alias (loop avoidance)
            if rec is not None and rec.area_id == self.area and rec.aler_labels:
                try:
                    aler = self.select_aler(rec)
                except NoAlerAvailable:
                    self.services.send(MessageKind.BINDING_REPLY_NEGATIVE,
                                       msg.src, NegativeReplyPayload(prefix))
                    return
                rec.lrl.add_external(msg.payload.requestor_area, self.area)
                reply = MobilityBinding(
                    prefix=prefix,
                    origin_next_hop=aler,
                    label=rec.aler_labels[aler],
                    area_id=self.area,
                    update_mode=UpdateMode.SELECTIVE_DOWNSTREAM_PUSH,
                    update_type=UpdateType.EXTERNAL,
                    lifetime_s=rec.binding.lifetime_s,
                )
                self.services.send(MessageKind.BINDING_REPLY_POSITIVE, msg.src,
                                   UpdatePayload(reply))
            else:
                self.services.send(MessageKind.BINDING_REPLY_NEGATIVE, msg.src,
                                   NegativeReplyPayload(prefix))
            return
        # internal LER client
        if rec is not None and rec.area_id == self.area:
            rec.lrl.add_internal(msg.src)
            self.services.send(MessageKind.BINDING_REPLY_POSITIVE, msg.src,
                               UpdatePayload(rec.binding))
            return
        if rec is not None and rec.resolved_local is not None:
            rec.lrl.add_internal(msg.src)
            self.services.send(MessageKind.BINDING_REPLY_POSITIVE, msg.src,
                               UpdatePayload(rec.resolved_local))
            return
        pending = self.pending.get(key)
        if pending is not None:
            if msg.src not in pending.lers:
                pending.lers.append(msg.src)
            return
        if not self.peers:
            self.services.send(MessageKind.BINDING_REPLY_NEGATIVE, msg.src,
                               NegativeReplyPayload(prefix))
            return
        pending = _PendingRequest(lers=[msg.src], awaiting=set(self.peers))
        self.pending[key] = pending
        payload = RequestPayload(prefix, msg.payload.requestor_area)
        for peer in self.peers:
            self.services.send(MessageKind.BINDING_REQUEST, peer, payload)

    def handle_reply(self, msg: ControlMessage):
        """Aggregate peer replies for a flooded request: first positive wins
        and is pushed down through the ALER; all-negative fails the LERs."""
        prefix = msg.prefix
        key = str(prefix)
        pending = self.pending.get(key)
        if pending is None:
            if msg.kind is MessageKind.BINDING_REPLY_POSITIVE:
                self.services.emit("warn", {"what": "unexpected_positive_reply",
                                            "prefix": key, "from": msg.src})
            return
        if msg.kind is MessageKind.BINDING_REPLY_NEGATIVE:
            pending.awaiting.discard(msg.src)
            if not pending.awaiting and not pending.resolved:
                del self.pending[key]
                for ler in pending.lers:
                    self.services.send(MessageKind.BINDING_REPLY_NEGATIVE, ler,
                                       NegativeReplyPayload(prefix))
            return
        if pending.resolved:
            return  # a twin AMRR already answered
        pending.resolved = True
        pending.awaiting.clear()
        binding = msg.payload.binding
        rec = self.records.get(key)
        if rec is None:
            rec = AmrrRecord(prefix, binding, binding.area_id)
            self.records[key] = rec
        else:
            rec.binding = binding
            rec.area_id = binding.area_id
        rec.expiry = self.services.now() + binding.lifetime_s
        self._reflect_to_alers(binding, UpdateType.EXTERNAL)
        # the LERs are answered once the ALER re-originates inward

    # ------------------------------------------------------ LRL exchange

    def _send_lrl_exchange(self, rec: AmrrRecord, target_area: int):
        content = self._own_external_content(rec)
        if content is None:
            self.services.emit("warn", {"what": "lrl_without_alias",
                                        "prefix": str(rec.prefix)})
            return
        for amrr in self.amrrs_by_area.get(target_area, []):
            self.services.send(MessageKind.BINDING_UPDATE, amrr,
                               UpdatePayload(content))
            self.services.send(MessageKind.LRL_REQUEST, amrr,
                               LrlRequestPayload(rec.prefix))

    def handle_lrl_request(self, msg: ControlMessage):
        key = str(msg.payload.prefix)
        rec = self._live_record(key)
        areas: tuple[int, ...] = ()
        if rec is not None:
            areas = tuple(rec.lrl.external)
            rec.lrl.external.clear()  # transferred, not duplicated
        self.services.send(MessageKind.LRL_REPLY, msg.src,
                           LrlReplyPayload(msg.payload.prefix, areas))

    def handle_lrl_reply(self, msg: ControlMessage):
        key = str(msg.payload.prefix)
        rec = self.records.get(key)
        if rec is None:
            return
        content = self._own_external_content(rec)
        for area in msg.payload.area_ids:
            rec.lrl.add_external(area, self.area)
            if area == self.area or content is None:
                continue
            for amrr in self.amrrs_by_area.get(area, []):
                self.services.send(MessageKind.BINDING_UPDATE, amrr,
                                   UpdatePayload(content))

    def _own_external_content(self, rec: AmrrRecord) -> MobilityBinding | None:
        alers = self._live_alers()
        for aler in alers:
            if aler in rec.aler_labels:
                return MobilityBinding(
                    prefix=rec.prefix,
                    origin_next_hop=aler,
                    label=rec.aler_labels[aler],
                    area_id=self.area,
                    update_mode=UpdateMode.UNSOLICITED_DOWNSTREAM_PUSH,
                    update_type=UpdateType.EXTERNAL,
                    lifetime_s=rec.binding.lifetime_s,
                )
        return None

    # --------------------------------------------------------- withdrawal

    def handle_withdrawal(self, msg: ControlMessage):
        key = str(msg.payload.prefix)
        rec = self._live_record(key)
        if rec is None:
            return
        payload = WithdrawalPayload(msg.payload.prefix, msg.payload.origin_next_hop)
        if msg.src in self.ler_clients:
            if rec.binding.origin_next_hop != msg.src:
                # the mobile already re-registered elsewhere; the old LER's
                # withdrawal must not tear down the fresh state
                self.services.emit("ignored_withdrawal",
                                   {"prefix": key, "from": msg.src})
                return
            for ler in rec.lrl.internal:
                self.services.send(MessageKind.BINDING_WITHDRAWAL, ler, payload)
            for aler in self._live_alers():
                self.services.send(MessageKind.BINDING_WITHDRAWAL, aler, payload)
            for area in rec.lrl.external:
                for amrr in self.amrrs_by_area.get(area, []):
                    self.services.send(MessageKind.BINDING_WITHDRAWAL, amrr,
                                       payload)
            del self.records[key]
            return
        # from a peer AMRR: purely local fan-out, never re-forwarded
        for ler in rec.lrl.internal:
            self.services.send(MessageKind.BINDING_WITHDRAWAL, ler, payload)
        for aler in self._live_alers():
            self.services.send(MessageKind.BINDING_WITHDRAWAL, aler, payload)
        del self.records[key]

    # ---------------------------------------------------- high availability

    def select_aler(self, rec: AmrrRecord) -> str:
        """Round-robin over the live ALER aliases of a record."""
        live = [a for a in sorted(rec.aler_labels) if a not in self.failed_alers]
        if not live:
            raise NoAlerAvailable(f"no live ALER for {rec.prefix}")
        choice = live[self.rr_counter % len(live)]
        self.rr_counter += 1
        return choice

    def handle_aler_failure(self, failed: str):
        if failed not in self.aler_clients:
            return
        self.failed_alers.add(failed)
        survivor = self.ha_twin.get(failed)
        if survivor is None:
            self.services.emit("warn", {"what": "aler_failed_without_twin",
                                        "node": failed})
            return
        payload = FailoverBlanketPayload(survivor, failed)
        for peer in self.peers:
            if self.services.area_of(peer) != self.area:
                self.services.send(MessageKind.ALER_FAILOVER_BLANKET, peer,
                                   payload)

    def handle_blanket(self, msg: ControlMessage):
        survivor, failed = msg.payload.survivor, msg.payload.failed
        for key in sorted(self.records):
            rec = self.records[key]
            if rec.binding.origin_next_hop == failed:
                rec.binding = dataclasses.replace(rec.binding,
                                                  origin_next_hop=survivor)
        for aler in self._live_alers():
            self.services.send(MessageKind.ALER_FAILOVER_BLANKET, aler,
                               msg.payload)

    def _live_alers(self) -> list[str]:
        return [a for a in self.aler_clients if a not in self.failed_alers]

    # -------------------------------------------------------------- misc

    def expire_records(self, now: float):
        for key in [k for k, r in self.records.items() if now > r.expiry]:
            del self.records[key]

    def dump(self, name_of) -> list[str]:
        return [self.records[key].dump_line(name_of)
                for key in sorted(self.records)]
