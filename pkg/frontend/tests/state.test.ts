import { describe, expect, it } from "vitest";

import { Envelope } from "../src/protocol";
import {
  EVENT_LOG_MAX,
  REPLAY_BUFFER_MAX,
  applyMessage,
  frameToRender,
  initialState,
  isReferee,
  isStale,
} from "../src/state";

function detection(frame: number, t: number): Envelope {
  return {
    type: "detection",
    seq: frame,
    t,
    data: {
      frame,
      robots: [{ team: "green", number: 1, x: 0.1, y: 0.2, theta: 0.3 }],
      ball: { x: 0, y: 0 },
      calibration_ok: true,
    },
  };
}

describe("state reducer", () => {
  it("tracks the latest frame and game state", () => {
    const s = initialState();
    applyMessage(s, detection(1, 0.033), 1000);
    applyMessage(
      s,
      {
        type: "game_state",
        seq: 2,
        t: 0.033,
        data: {
          phase: "running", score: { green: 1, blue: 0 }, clock: 5, half: 1,
          sides: { green: -1, blue: 1 }, goal_pending: false,
          penalties: [], preempted: [], hold: [],
        },
      },
      1001,
    );
    expect(s.frame?.data.frame).toBe(1);
    expect(s.gameState?.score.green).toBe(1);
  });

  it("adopts the role from the auth ack", () => {
    const s = initialState();
    applyMessage(
      s,
      { type: "ack", seq: 1, t: 0, data: { ack_of: 1, info: { team: "referee" } } },
      0,
    );
    expect(isReferee(s)).toBe(true);
  });

  it("ignores unknown message types (forward compatibility)", () => {
    const s = initialState();
    applyMessage(s, { type: "telemetry_v2", seq: 1, t: 0, data: { x: 1 } }, 0);
    expect(s.frame).toBeNull();
  });

  it("bounds the replay buffer over a long stream", () => {
    const s = initialState();
    const frames = REPLAY_BUFFER_MAX * 2;
    for (let i = 0; i < frames; i++) {
      applyMessage(s, detection(i, i / 30), i);
    }
    expect(s.replayBuffer.length).toBe(REPLAY_BUFFER_MAX);
    // the retained window is the most recent one
    expect(s.replayBuffer[0].data.frame).toBe(frames - REPLAY_BUFFER_MAX);
    expect(s.replayBuffer.at(-1)?.data.frame).toBe(frames - 1);
  });

  it("renders a five-minute replay without exceeding the bounded buffer", () => {
    const s = initialState();
    const fiveMinutes = 5 * 60 * 30; // 9000 frames at 30 Hz
    for (let i = 0; i < fiveMinutes; i++) {
      applyMessage(s, detection(i, i / 30), i);
    }
    expect(s.replayBuffer.length).toBeLessThanOrEqual(REPLAY_BUFFER_MAX);
    expect(s.replayBuffer.length).toBe(fiveMinutes > REPLAY_BUFFER_MAX ? REPLAY_BUFFER_MAX : fiveMinutes);
  });

  it("bounds the event log", () => {
    const s = initialState();
    for (let i = 0; i < 500; i++) {
      applyMessage(
        s,
        { type: "goal", seq: i, t: i, data: { team: "green", t: i, x: 0.9, y: 0 } },
        i,
      );
    }
    expect(s.events.length).toBe(EVENT_LOG_MAX);
  });

  it("scrubbing picks frames from the buffer", () => {
    const s = initialState();
    for (let i = 0; i < 10; i++) applyMessage(s, detection(i, i / 30), i);
    s.replayMode = true;
    s.replayPosition = 3;
    expect(frameToRender(s)?.data.frame).toBe(3);
    s.replayMode = false;
    expect(frameToRender(s)?.data.frame).toBe(9);
  });

  it("flags stale data after one second", () => {
    const s = initialState();
    applyMessage(s, detection(1, 0.03), 1000);
    expect(isStale(s, 1500)).toBe(false);
    expect(isStale(s, 2100)).toBe(true);
  });
});
