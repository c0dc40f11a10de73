/**
 * Socket wrapper: one WebSocket to the game controller plus the
 * console's outbound surface (auth + referee actions). The console
 * without a referee key is read-only by construction: every referee
 * action still goes through the service's key check and comes back as a
 * nack, which the UI surfaces.
 */

import { Envelope, MessageWriter, RefereeAction, decode, encode } from "./protocol.js";

export interface ConsoleSocket {
  sendAuth(key: string): void;
  sendReferee(action: RefereeAction): Envelope;
  close(): void;
}

export function openSocket(
  url: string,
  onMessage: (msg: Envelope) => void,
  onStatus: (status: "open" | "closed") => void,
  now: () => number = () => Date.now() / 1000,
): ConsoleSocket {
  const writer = new MessageWriter(now);
  const ws = new WebSocket(url);
  ws.onopen = () => onStatus("open");
  ws.onclose = () => onStatus("closed");
  ws.onmessage = (event: MessageEvent) => {
    try {
      onMessage(decode(String(event.data)));
    } catch {
      // tolerate junk: the service never sends any, but a proxy might
    }
  };
  return {
    sendAuth(key: string): void {
      ws.send(encode(writer.auth(key)));
    },
    sendReferee(action: RefereeAction): Envelope {
      const msg = writer.referee(action);
      ws.send(encode(msg));
      return msg;
    },
    close(): void {
      ws.close();
    },
  };
}
