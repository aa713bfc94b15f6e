/** Application wiring: WebSocket, config dialog, command flow. */

import { AnimationQueue } from "./animate.js";
import { ConfigModel } from "./config.js";
import type { GameEvent, Snapshot, TopicInfo } from "./protocol.js";
import { QuestionDialog } from "./question.js";
import { BoardRenderer, renderBadges, renderDice, renderWinner } from "./render.js";
import { applyEvent, initialView, type ClientViewState } from "./view.js";

const $ = (id: string) => document.getElementById(id)!;

let view: ClientViewState | null = null;
let sessionId: string | null = null;
let socket: WebSocket | null = null;
let renderer: BoardRenderer | null = null;
let pumping = false;

const queue = new AnimationQueue();
const config = new ConfigModel();
const questionDialog = new QuestionDialog();

function send(cmd: Record<string, unknown>): void {
  if (sessionId) cmd["session"] = sessionId;
  socket?.send(JSON.stringify(cmd));
}

function connect(): void {
  const url = `ws://${location.host}/ws`;
  socket = new WebSocket(url);
  socket.onopen = () => {
    $("status").textContent = "connected";
    socket?.send(JSON.stringify({ cmd: "list_topics" }));
  };
  socket.onclose = () => {
    $("status").textContent = "disconnected — reload to retry";
  };
  socket.onmessage = (frame) => handleEvent(JSON.parse(frame.data as string));
}

function handleEvent(event: GameEvent): void {
  if (event.event === "topics") {
    const languages = event["languages"] as Record<string, { topics: TopicInfo[] }>;
    const lang = languages[config.language] ? config.language : Object.keys(languages)[0]!;
    config.setTopics(lang, languages[lang]?.topics ?? []);
    renderConfigDialog(Object.keys(languages));
    return;
  }
  if (event.event === "error") {
    $("errors").textContent = `${event["code"]}: ${event["msg"]}`;
    return;
  }
  if (event.event === "session_created") {
    sessionId = event["session"] as string;
    view = initialView(event["snapshot"] as Snapshot);
    renderer = new BoardRenderer($("board"), queue);
    renderer.build(view.snapshot);
    ($("setup") as HTMLDialogElement).close();
    send({ cmd: "start" });
    repaint();
    return;
  }
  if (!view) return;
  applyEvent(view, event);

  if (event.event === "question" && view.pendingQuestion) {
    openQuestion();
  }
  if (event.event === "answered") {
    questionDialog.adjudicate(event["correct"] as boolean);
    window.setTimeout(() => {
      questionDialog.close();
      ($("question") as HTMLDialogElement).close();
    }, (event["correct"] as boolean) ? 350 : 900);
  }
  repaint();
}

function repaint(): void {
  if (!view) return;
  renderDice(view);
  renderBadges(view);
  renderWinner(view);
  renderMoveChoices();
  if (view.animationQueue.length > 0 && renderer && !pumping) {
    queue.enqueue(view.animationQueue.splice(0));
    pumping = true;
    renderer.pump(view.snapshot, () => {
      pumping = false;
      if (view) renderDice(view); // input unblocks once the queue drains
    });
  }
}

function renderMoveChoices(): void {
  const bar = $("choices");
  bar.innerHTML = "";
  if (!view?.moveChoices) {
    bar.hidden = true;
    return;
  }
  bar.hidden = false;
  const label = document.createElement("span");
  label.textContent = "Choose a marker:";
  bar.appendChild(label);
  for (const cand of view.moveChoices) {
    const button = document.createElement("button");
    button.textContent = `#${cand.marker + 1} → ${cand.path[cand.path.length - 1]}`;
    button.onclick = () => send({ cmd: "choose_marker", marker: cand.marker });
    bar.appendChild(button);
  }
}

function openQuestion(): void {
  if (!view?.pendingQuestion) return;
  const q = questionDialog.open(view.pendingQuestion);
  $("q-prompt").textContent = q.prompt;
  const image = $("q-image") as HTMLImageElement;
  image.hidden = q.imageUrl === null;
  if (q.imageUrl) image.src = q.imageUrl;
  const buttons = $("q-options");
  buttons.innerHTML = "";
  q.options.forEach((option, i) => {
    const button = document.createElement("button");
    button.textContent = option;
    button.onclick = () => {
      const choice = questionDialog.choose(i);
      if (choice !== null) {
        send({ cmd: "answer", option: choice });
        buttons.querySelectorAll("button").forEach((b) => (b.disabled = true));
      }
    };
    buttons.appendChild(button);
  });
  ($("question") as HTMLDialogElement).showModal();
}

function renderConfigDialog(languages: string[]): void {
  const dialog = $("setup") as HTMLDialogElement;
  const langSelect = $("cfg-language") as HTMLSelectElement;
  langSelect.innerHTML = languages
    .map((l) => `<option ${l === config.language ? "selected" : ""}>${l}</option>`)
    .join("");
  const teamsBox = $("cfg-teams");
  teamsBox.innerHTML = "";
  config.teams.forEach((team, i) => {
    const row = document.createElement("div");
    row.className = "team-row";
    const name = document.createElement("input");
    name.value = team.name;
    name.oninput = () => {
      team.name = name.value;
      refreshSubmit();
    };
    row.appendChild(name);
    config.availableTopics.forEach((topic) => {
      const tag = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = team.topics.has(topic.id);
      box.onchange = () => {
        config.toggleTopic(i, topic.id);
        refreshSubmit();
      };
      tag.appendChild(box);
      tag.append(` ${topic.name} (${topic.count})`);
      row.appendChild(tag);
    });
    teamsBox.appendChild(row);
  });
  refreshSubmit();
  if (!dialog.open) dialog.showModal();
}

function refreshSubmit(): void {
  ($("cfg-start") as HTMLButtonElement).disabled = !config.valid();
}

function wireControls(): void {
  ($("cfg-game") as HTMLSelectElement).onchange = (e) => {
    config.game = (e.target as HTMLSelectElement).value;
  };
  ($("cfg-mode") as HTMLSelectElement).onchange = (e) => {
    config.mode = (e.target as HTMLSelectElement).value as "classic" | "fast";
  };
  ($("cfg-dice") as HTMLSelectElement).onchange = (e) => {
    config.dice = (e.target as HTMLSelectElement).value as "manual" | "auto";
  };
  ($("cfg-language") as HTMLSelectElement).onchange = (e) => {
    config.language = (e.target as HTMLSelectElement).value;
    socket?.send(JSON.stringify({ cmd: "list_topics" }));
  };
  ($("cfg-count") as HTMLSelectElement).onchange = (e) => {
    config.setTeamCount(Number((e.target as HTMLSelectElement).value));
    renderConfigDialog([config.language]);
  };
  ($("cfg-start") as HTMLButtonElement).onclick = () => {
    socket?.send(JSON.stringify(config.toCommand()));
  };
  ($("dice") as HTMLButtonElement).onclick = () => send({ cmd: "roll" });
  ($("speed") as HTMLInputElement).oninput = (e) => {
    queue.speedMs = Number((e.target as HTMLInputElement).value);
  };
}

wireControls();
connect();
