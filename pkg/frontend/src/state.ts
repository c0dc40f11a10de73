/**
 * Console state and the pure reducer that folds inbound messages into it.
 *
 * Rendering is a pure function of this state. The replay buffer is a
 * bounded ring (REPLAY_BUFFER_MAX frames ~ a bit over five minutes at
 * 30 Hz), so watching an arbitrarily long stream cannot grow memory.
 */

import {
  AckData,
  DetectionData,
  Envelope,
  GameStateData,
  GoalData,
  HelloData,
  NackData,
} from "./protocol.js";

export const REPLAY_BUFFER_MAX = 10_000; // frames; > 5 min at 30 Hz
export const EVENT_LOG_MAX = 50;
export const STALE_AFTER_MS = 1000;

export interface TimedFrame {
  t: number;
  data: DetectionData;
  receivedAt: number; // wall clock ms
}

export interface ConsoleState {
  connection: "connecting" | "open" | "closed";
  role: string; // spectator until an auth ack says otherwise
  hello: HelloData | null;
  frame: TimedFrame | null;
  gameState: GameStateData | null;
  selected: { team: string; number: number } | null;
  events: string[]; // human-readable, newest last, bounded
  lastNack: NackData | null;
  replayMode: boolean;
  replayBuffer: TimedFrame[];
  replayPosition: number | null; // index into replayBuffer; null = live end
}

export function initialState(): ConsoleState {
  return {
    connection: "connecting",
    role: "spectator",
    hello: null,
    frame: null,
    gameState: null,
    selected: null,
    events: [],
    lastNack: null,
    replayMode: false,
    replayBuffer: [],
    replayPosition: null,
  };
}

function pushEvent(state: ConsoleState, text: string): void {
  state.events.push(text);
  if (state.events.length > EVENT_LOG_MAX) {
    state.events.splice(0, state.events.length - EVENT_LOG_MAX);
  }
}

/** Fold one inbound message into the state (mutates and returns it). */
export function applyMessage(
  state: ConsoleState,
  msg: Envelope,
  wallNow: number,
): ConsoleState {
  switch (msg.type) {
    case "hello":
      state.hello = msg.data as HelloData;
      break;
    case "detection": {
      const frame: TimedFrame = {
        t: msg.t,
        data: msg.data as DetectionData,
        receivedAt: wallNow,
      };
      state.frame = frame;
      state.replayBuffer.push(frame);
      if (state.replayBuffer.length > REPLAY_BUFFER_MAX) {
        state.replayBuffer.splice(0, state.replayBuffer.length - REPLAY_BUFFER_MAX);
      }
      break;
    }
    case "game_state":
      state.gameState = msg.data as GameStateData;
      break;
    case "goal": {
      const g = msg.data as GoalData;
      pushEvent(state, `GOAL ${g.team} at t=${g.t.toFixed(2)}s`);
      break;
    }
    case "penalty": {
      const p = msg.data as { team: string; number: number; duration: number };
      pushEvent(state, `penalty ${p.team}-${p.number} for ${p.duration}s`);
      break;
    }
    case "ack": {
      const a = msg.data as AckData;
      const team = a.info?.["team"];
      if (typeof team === "string") {
        state.role = team;
      }
      break;
    }
    case "nack":
      state.lastNack = msg.data as NackData;
      pushEvent(state, `rejected: ${(msg.data as NackData).reason}`);
      break;
    default:
      break; // forward compatibility: ignore unknown types
  }
  return state;
}

/** The frame the view should draw: live, or the scrub position in replay. */
export function frameToRender(state: ConsoleState): TimedFrame | null {
  if (state.replayMode && state.replayPosition !== null) {
    const i = Math.max(0, Math.min(state.replayPosition, state.replayBuffer.length - 1));
    return state.replayBuffer[i] ?? null;
  }
  return state.frame;
}

export function isStale(state: ConsoleState, wallNow: number): boolean {
  if (state.frame === null) {
    return true;
  }
  return wallNow - state.frame.receivedAt > STALE_AFTER_MS;
}

export function isReferee(state: ConsoleState): boolean {
  return state.role === "referee";
}
