/**
 * Scene computation and canvas drawing.
 *
 * `computeScene` is pure: console state in, a list of positioned glyphs
 * out, with all field coordinates (meters, y up) mapped to canvas pixels
 * (y down). `drawScene` just walks the glyph list with a 2D context, so
 * everything interesting is unit-testable without a browser.
 */
import { frameToRender, isStale } from "./state.js";
const ROBOT_RADIUS_M = 0.09;
const BALL_RADIUS_M = 0.021;
const HOLD_LIMIT_S = 5.0;
export function fieldTransform(hello, canvasW, canvasH) {
    const { length, width, margin } = hello.field;
    const spanX = length + 2 * margin;
    const spanY = width + 2 * margin;
    const scale = Math.min(canvasW / spanX, canvasH / spanY);
    return { scale, originX: canvasW / 2, originY: canvasH / 2 };
}
export function toCanvas(tf, x, y) {
    return [tf.originX + x * tf.scale, tf.originY - y * tf.scale];
}
function holdFraction(gs, team, number) {
    if (!gs)
        return 0;
    for (const [t, n, v] of gs.hold) {
        if (t === team && n === number)
            return Math.min(1, v / HOLD_LIMIT_S);
    }
    return 0;
}
function isListed(pairs, team, number) {
    return (pairs ?? []).some(([t, n]) => t === team && n === number);
}
export function computeScene(state, canvasW, canvasH, wallNow) {
    if (!state.hello)
        return null;
    const tf = fieldTransform(state.hello, canvasW, canvasH);
    const { length, width, goal_width } = state.hello.field;
    const [fx, fy] = toCanvas(tf, -length / 2, width / 2);
    const fieldRect = { x: fx, y: fy, w: length * tf.scale, h: width * tf.scale };
    const goalMouths = [-1, 1].map((side) => {
        const [gx, gy] = toCanvas(tf, (side * length) / 2, goal_width / 2);
        return { x: gx, y: gy, h: goal_width * tf.scale };
    });
    const glyphs = [];
    const frame = frameToRender(state);
    const gs = state.gameState;
    const penalized = new Set((gs?.penalties ?? []).map(([t, n]) => `${t}-${n}`));
    if (frame) {
        for (const r of frame.data.robots) {
            const [x, y] = toCanvas(tf, r.x, r.y);
            const tip = toCanvas(tf, r.x + ROBOT_RADIUS_M * Math.cos(r.theta), r.y + ROBOT_RADIUS_M * Math.sin(r.theta));
            glyphs.push({
                kind: "robot",
                x,
                y,
                headingX: tip[0],
                headingY: tip[1],
                radius: ROBOT_RADIUS_M * tf.scale,
                team: r.team,
                number: r.number,
                penalized: penalized.has(`${r.team}-${r.number}`),
                preempted: isListed(gs?.preempted, r.team, r.number),
                holdFraction: holdFraction(gs, r.team, r.number),
                selected: state.selected?.team === r.team && state.selected?.number === r.number,
            });
        }
        if (frame.data.ball) {
            const [x, y] = toCanvas(tf, frame.data.ball.x, frame.data.ball.y);
            glyphs.push({ kind: "ball", x, y, radius: Math.max(3, BALL_RADIUS_M * tf.scale) });
        }
        else {
            glyphs.push({ kind: "badge", text: "ball lost", tone: "warn" });
        }
        if (!frame.data.calibration_ok) {
            glyphs.push({ kind: "badge", text: "calibration FAILED", tone: "warn" });
        }
    }
    else {
        glyphs.push({ kind: "badge", text: "no detections yet", tone: "info" });
    }
    if (!state.replayMode && isStale(state, wallNow)) {
        glyphs.push({ kind: "badge", text: "STALE DATA", tone: "warn" });
    }
    if (state.replayMode) {
        glyphs.push({ kind: "badge", text: "replay view", tone: "info" });
    }
    const score = gs ? `green ${gs.score.green} : ${gs.score.blue} blue` : "-";
    const status = gs
        ? `${gs.phase} | half ${gs.half} | clock ${gs.clock.toFixed(1)}s | role ${state.role}`
        : `connecting | role ${state.role}`;
    return { transform: tf, fieldRect, goalMouths, glyphs, scoreLine: score, statusLine: status };
}
const TEAM_COLORS = { green: "#2e9e4f", blue: "#2d6cdf" };
export function drawScene(ctx, scene, w, h) {
    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#143214";
    ctx.fillRect(0, 0, w, h);
    ctx.fillStyle = "#1e4d1e";
    ctx.fillRect(scene.fieldRect.x, scene.fieldRect.y, scene.fieldRect.w, scene.fieldRect.h);
    ctx.strokeStyle = "#e8e8e8";
    ctx.lineWidth = 2;
    ctx.strokeRect(scene.fieldRect.x, scene.fieldRect.y, scene.fieldRect.w, scene.fieldRect.h);
    for (const goal of scene.goalMouths) {
        ctx.strokeStyle = "#ff5050";
        ctx.lineWidth = 5;
        ctx.beginPath();
        ctx.moveTo(goal.x, goal.y);
        ctx.lineTo(goal.x, goal.y + goal.h);
        ctx.stroke();
    }
    let badgeY = 28;
    for (const glyph of scene.glyphs) {
        if (glyph.kind === "robot") {
            ctx.beginPath();
            ctx.fillStyle = TEAM_COLORS[glyph.team] ?? "#999";
            ctx.arc(glyph.x, glyph.y, glyph.radius, 0, 2 * Math.PI);
            ctx.fill();
            if (glyph.penalized || glyph.preempted) {
                ctx.strokeStyle = glyph.penalized ? "#ff3333" : "#ffb020";
                ctx.lineWidth = 3;
                ctx.stroke();
            }
            if (glyph.selected) {
                ctx.strokeStyle = "#ffffff";
                ctx.lineWidth = 2;
                ctx.beginPath();
                ctx.arc(glyph.x, glyph.y, glyph.radius + 4, 0, 2 * Math.PI);
                ctx.stroke();
            }
            if (glyph.holdFraction > 0) {
                ctx.strokeStyle = "#ffd040";
                ctx.lineWidth = 3;
                ctx.beginPath();
                ctx.arc(glyph.x, glyph.y, glyph.radius + 7, -Math.PI / 2, -Math.PI / 2 + glyph.holdFraction * 2 * Math.PI);
                ctx.stroke();
            }
            ctx.strokeStyle = "#ffffff";
            ctx.lineWidth = 2;
            ctx.beginPath();
            ctx.moveTo(glyph.x, glyph.y);
            ctx.lineTo(glyph.headingX, glyph.headingY);
            ctx.stroke();
            ctx.fillStyle = "#ffffff";
            ctx.font = "11px sans-serif";
            ctx.textAlign = "center";
            ctx.fillText(String(glyph.number), glyph.x, glyph.y + 4);
        }
        else if (glyph.kind === "ball") {
            ctx.beginPath();
            ctx.fillStyle = "#ff9f1a";
            ctx.arc(glyph.x, glyph.y, glyph.radius, 0, 2 * Math.PI);
            ctx.fill();
        }
        else {
            ctx.fillStyle = glyph.tone === "warn" ? "#ff5050" : "#cccccc";
            ctx.font = "bold 13px sans-serif";
            ctx.textAlign = "left";
            ctx.fillText(glyph.text, 10, badgeY);
            badgeY += 18;
        }
    }
}
