/**
 * DOM shell around the pure viewer model: load a trace from a file
 * picker or a `?trace=` URL, then navigate with buttons or arrow keys.
 */

import {
    loadTrace,
    next,
    prev,
    render,
    skip,
    togglePane,
    unskip,
    ViewModel,
    ViewState,
} from "./viewer.js";

let state: ViewState | null = null;

function $(id: string): HTMLElement {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
}

function setState(s: ViewState): void {
    state = s;
    draw(render(s));
}

function paneHtml(text: string, span: [number, number] | null, cls: string): string {
    if (!span) return escapeHtml(text);
    const [a, b] = span;
    return (
        escapeHtml(text.slice(0, a)) +
        `<mark class="${cls}">` +
        escapeHtml(text.slice(a, b)) +
        "</mark>" +
        escapeHtml(text.slice(b))
    );
}

function escapeHtml(s: string): string {
    return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function draw(vm: ViewModel): void {
    const panes = $("panes");
    panes.innerHTML = "";
    if (vm.empty) {
        panes.innerHTML = '<p class="placeholder">no reductions: the program is already a value</p>';
    } else {
        for (const pane of vm.panes) {
            if (vm.showPane !== "both" && vm.panes.length === 2) {
                if (vm.showPane === "pre" && pane.highlight === "reduct") continue;
                if (vm.showPane === "post" && pane.highlight === "redex") continue;
            }
            const div = document.createElement("div");
            div.className = "pane";
            const title = document.createElement("h3");
            title.textContent = pane.label + (pane.highlight === "redex" && vm.rule ? ` — ${vm.rule}` : "");
            const pre = document.createElement("pre");
            pre.innerHTML = paneHtml(pane.text, pane.span, pane.highlight ?? "");
            div.append(title, pre);
            panes.append(div);
        }
    }
    $("position").textContent = `state ${vm.cursor} / ${vm.lastState}`;
    $("output").textContent = vm.output;
    $("result").textContent =
        vm.cursor === vm.lastState ? `${vm.result.kind}: ${vm.result.text}` : "";

    const crumbs = $("breadcrumbs");
    crumbs.innerHTML = "";
    for (const r of vm.breadcrumbs) {
        const btn = document.createElement("button");
        btn.textContent = r.collapsed
            ? `application @${r.id} (collapsed)`
            : `application @${r.id}: steps ${r.first}..${r.last}`;
        btn.title = r.collapsed ? "expand this application" : "skip over this application";
        btn.onclick = () => {
            if (!state) return;
            setState(r.collapsed ? unskip(state, r.id) : skip(state, r.id));
        };
        crumbs.append(btn);
    }
}

function loadText(raw: string): void {
    try {
        setState(loadTrace(raw));
        $("error").textContent = "";
    } catch (ex) {
        $("error").textContent = (ex as Error).message;
    }
}

export function init(): void {
    $("prev").onclick = () => state && setState(prev(state));
    $("next").onclick = () => state && setState(next(state));
    $("toggle").onclick = () => state && setState(togglePane(state));
    document.addEventListener("keydown", (ev) => {
        if (!state) return;
        if (ev.key === "ArrowRight") setState(next(state));
        if (ev.key === "ArrowLeft") setState(prev(state));
    });
    const picker = $("file") as HTMLInputElement;
    picker.onchange = () => {
        const file = picker.files?.[0];
        if (!file) return;
        file.text().then(loadText);
    };
    const url = new URLSearchParams(window.location.search).get("trace");
    if (url) {
        fetch(url)
            .then((r) => r.text())
            .then(loadText)
            .catch((ex) => {
                $("error").textContent = `cannot fetch ${url}: ${ex}`;
            });
    }
}

if (typeof document !== "undefined") {
    document.addEventListener("DOMContentLoaded", init);
}
