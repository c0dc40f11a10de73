/**
 * Wire protocol types and message construction for the operator console.
 *
 * One JSON object per WebSocket text frame: a type tag, per-sender
 * sequence number, timestamp and typed payload. The console only ever
 * emits `auth` and `referee` messages; everything else is inbound.
 */
/** Outbound message factory keeping the per-sender sequence. */
export class MessageWriter {
    constructor(now = () => 0) {
        this.seq = 0;
        this.now = now;
    }
    auth(key) {
        return this.wrap("auth", { key });
    }
    referee(action) {
        return this.wrap("referee", action);
    }
    wrap(type, data) {
        this.seq += 1;
        return { type, seq: this.seq, t: this.now(), data };
    }
}
export function encode(msg) {
    return JSON.stringify(msg);
}
export function decode(text) {
    const obj = JSON.parse(text);
    if (typeof obj !== "object" || obj === null ||
        typeof obj.type !== "string" ||
        typeof obj.seq !== "number" ||
        typeof obj.t !== "number" ||
        typeof obj.data !== "object") {
        throw new Error("malformed wire message");
    }
    return obj;
}
