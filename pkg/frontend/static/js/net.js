/**
 * Socket wrapper: one WebSocket to the game controller plus the
 * console's outbound surface (auth + referee actions). The console
 * without a referee key is read-only by construction: every referee
 * action still goes through the service's key check and comes back as a
 * nack, which the UI surfaces.
 */
import { MessageWriter, decode, encode } from "./protocol.js";
export function openSocket(url, onMessage, onStatus, now = () => Date.now() / 1000) {
    const writer = new MessageWriter(now);
    const ws = new WebSocket(url);
    ws.onopen = () => onStatus("open");
    ws.onclose = () => onStatus("closed");
    ws.onmessage = (event) => {
        try {
            onMessage(decode(String(event.data)));
        }
        catch {
            // tolerate junk: the service never sends any, but a proxy might
        }
    };
    return {
        sendAuth(key) {
            ws.send(encode(writer.auth(key)));
        },
        sendReferee(action) {
            const msg = writer.referee(action);
            ws.send(encode(msg));
            return msg;
        },
        close() {
            ws.close();
        },
    };
}
