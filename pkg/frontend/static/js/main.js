/**
 * Browser entry point: wire the socket into the state, render on
 * animation frames, and hook up the referee controls.
 */
import { openSocket } from "./net.js";
import { computeScene, drawScene } from "./render.js";
import { applyMessage, initialState, isReferee, } from "./state.js";
const state = initialState();
let socket = null;
function byId(id) {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing element #${id}`);
    return el;
}
const canvas = byId("field");
const ctx = canvas.getContext("2d");
function connect() {
    const key = byId("key").value.trim();
    const url = `ws://${location.host}/api`;
    socket?.close();
    state.connection = "connecting";
    socket = openSocket(url, (msg) => {
        applyMessage(state, msg, Date.now());
        refreshPanel();
    }, (status) => {
        state.connection = status === "open" ? "open" : "closed";
        if (status === "open" && key)
            socket?.sendAuth(key);
        refreshPanel();
    });
}
function act(action) {
    if (!socket)
        return;
    socket.sendReferee(action);
}
function selectedRobot() {
    const raw = byId("robot").value;
    const [team, num] = raw.split("-");
    return { team: team, number: Number(num) };
}
function refreshPanel() {
    byId("score").textContent = state.gameState
        ? `green ${state.gameState.score.green} : ${state.gameState.score.blue} blue`
        : "-";
    byId("status").textContent =
        `${state.connection} | role ${state.role}` +
            (state.gameState ? ` | ${state.gameState.phase} | half ${state.gameState.half}` : "");
    byId("events").textContent = state.events.slice(-12).join("\n");
    const refOnly = byId("referee-controls");
    refOnly.classList.toggle("disabled", !isReferee(state));
    const slider = byId("scrub");
    slider.max = String(Math.max(0, state.replayBuffer.length - 1));
    if (!state.replayMode)
        slider.value = slider.max;
}
function renderLoop() {
    const scene = computeScene(state, canvas.width, canvas.height, Date.now());
    if (scene) {
        drawScene(ctx, scene, canvas.width, canvas.height);
        byId("score").textContent = scene.scoreLine;
        byId("status").textContent = scene.statusLine;
    }
    requestAnimationFrame(renderLoop);
}
byId("connect").onclick = connect;
byId("engage").onclick = () => act({ action: "engage" });
byId("run").onclick = () => act({ action: "run" });
byId("halftime").onclick = () => act({ action: "halftime" });
byId("swap").onclick = () => act({ action: "swap" });
byId("end").onclick = () => act({ action: "end" });
byId("preempt").onclick = () => act({ action: "preempt", ...selectedRobot() });
byId("release").onclick = () => act({ action: "release", ...selectedRobot() });
byId("ball-center").onclick = () => act({ action: "teleport_ball", x: 0, y: 0 });
const scrub = byId("scrub");
scrub.oninput = () => {
    state.replayMode = true;
    state.replayPosition = Number(scrub.value);
};
byId("live").onclick = () => {
    state.replayMode = false;
    state.replayPosition = null;
};
connect();
renderLoop();
