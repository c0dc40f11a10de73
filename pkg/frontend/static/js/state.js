/**
 * Console state and the pure reducer that folds inbound messages into it.
 *
 * Rendering is a pure function of this state. The replay buffer is a
 * bounded ring (REPLAY_BUFFER_MAX frames ~ a bit over five minutes at
 * 30 Hz), so watching an arbitrarily long stream cannot grow memory.
 */
export const REPLAY_BUFFER_MAX = 10000; // frames; > 5 min at 30 Hz
export const EVENT_LOG_MAX = 50;
export const STALE_AFTER_MS = 1000;
export function initialState() {
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
function pushEvent(state, text) {
    state.events.push(text);
    if (state.events.length > EVENT_LOG_MAX) {
        state.events.splice(0, state.events.length - EVENT_LOG_MAX);
    }
}
/** Fold one inbound message into the state (mutates and returns it). */
export function applyMessage(state, msg, wallNow) {
    switch (msg.type) {
        case "hello":
            state.hello = msg.data;
            break;
        case "detection": {
            const frame = {
                t: msg.t,
                data: msg.data,
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
            state.gameState = msg.data;
            break;
        case "goal": {
            const g = msg.data;
            pushEvent(state, `GOAL ${g.team} at t=${g.t.toFixed(2)}s`);
            break;
        }
        case "penalty": {
            const p = msg.data;
            pushEvent(state, `penalty ${p.team}-${p.number} for ${p.duration}s`);
            break;
        }
        case "ack": {
            const a = msg.data;
            const team = a.info?.["team"];
            if (typeof team === "string") {
                state.role = team;
            }
            break;
        }
        case "nack":
            state.lastNack = msg.data;
            pushEvent(state, `rejected: ${msg.data.reason}`);
            break;
        default:
            break; // forward compatibility: ignore unknown types
    }
    return state;
}
/** The frame the view should draw: live, or the scrub position in replay. */
export function frameToRender(state) {
    if (state.replayMode && state.replayPosition !== null) {
        const i = Math.max(0, Math.min(state.replayPosition, state.replayBuffer.length - 1));
        return state.replayBuffer[i] ?? null;
    }
    return state.frame;
}
export function isStale(state, wallNow) {
    if (state.frame === null) {
        return true;
    }
    return wallNow - state.frame.receivedAt > STALE_AFTER_MS;
}
export function isReferee(state) {
    return state.role === "referee";
}
