"use strict";
/**
 * Interactive layer for generated validation-report pages.
 *
 * The page embeds a JSON data island (script#report-data) plus one marker
 * button per error and one highlightable span per implicated cell. This
 * script binds: click on a marker toggles highlighting of the error's spans
 * in every involved location; hovering or focusing a marker shows the
 * error's explanation in a tooltip. It performs no network requests and has
 * no dependencies, so reports keep working when opened from disk.
 */
(function () {
    function readIsland(root) {
        const island = root.getElementById("report-data");
        if (!island || island.textContent === null) {
            return null;
        }
        try {
            const parsed = JSON.parse(island.textContent);
            if (!parsed || !Array.isArray(parsed.errors)) {
                return null;
            }
            return parsed.errors;
        }
        catch (_a) {
            return null;
        }
    }
    function showBanner(root, message) {
        const banner = root.getElementById("banner");
        if (banner) {
            banner.textContent = message;
            banner.removeAttribute("hidden");
        }
    }
    let tooltip = null;
    function ensureTooltip(root) {
        if (!tooltip || !root.body.contains(tooltip)) {
            tooltip = root.createElement("div");
            tooltip.className = "err-tooltip";
            tooltip.setAttribute("role", "tooltip");
            tooltip.setAttribute("id", "err-tooltip");
            tooltip.setAttribute("hidden", "");
            root.body.appendChild(tooltip);
        }
        return tooltip;
    }
    function showTooltip(root, marker, message) {
        var _a, _b;
        var _c, _d;
        const tip = ensureTooltip(root);
        tip.textContent = message;
        tip.removeAttribute("hidden");
        const rect = marker.getBoundingClientRect();
        tip.style.left = `${rect.left + ((_c = (_a = root.defaultView) === null || _a === void 0 ? void 0 : _a.scrollX) !== null && _c !== void 0 ? _c : 0)}px`;
        tip.style.top = `${rect.bottom + 6 + ((_d = (_b = root.defaultView) === null || _b === void 0 ? void 0 : _b.scrollY) !== null && _d !== void 0 ? _d : 0)}px`;
        marker.setAttribute("aria-describedby", "err-tooltip");
    }
    function hideTooltip(marker) {
        if (tooltip) {
            tooltip.setAttribute("hidden", "");
        }
        marker.removeAttribute("aria-describedby");
    }
    function spansFor(root, errorId) {
        const nodes = root.querySelectorAll(`.err-span[data-eid="${errorId}"]`);
        return Array.prototype.slice.call(nodes);
    }
    function hydrate(root) {
        const state = {
            errors: new Map(),
            markers: [],
            toggle: (errorId) => toggle(errorId),
            active: (errorId) => activeIds.has(errorId),
        };
        const activeIds = new Set();
        function toggle(errorId) {
            if (!state.errors.has(errorId)) {
                return; // unknown id: no-op
            }
            const turnOn = !activeIds.has(errorId);
            if (turnOn) {
                activeIds.add(errorId);
            }
            else {
                activeIds.delete(errorId);
            }
            for (const span of spansFor(root, errorId)) {
                span.classList.toggle("active", turnOn);
            }
            const marker = root.querySelector(`.err-marker[data-eid="${errorId}"]`);
            if (marker) {
                marker.classList.toggle("active", turnOn);
            }
        }
        const reportErrors = readIsland(root);
        if (reportErrors === null) {
            showBanner(root, "The embedded report data could not be read; "
                + "the table below is still complete, but interaction is disabled.");
            return state;
        }
        for (const error of reportErrors) {
            state.errors.set(error.id, error);
        }
        const markers = root.querySelectorAll(".err-marker[data-eid]");
        for (let i = 0; i < markers.length; i++) {
            const marker = markers[i];
            const errorId = marker.getAttribute("data-eid") || "";
            const error = state.errors.get(errorId);
            if (!error) {
                continue;
            }
            state.markers.push(marker);
            marker.addEventListener("click", () => toggle(errorId));
            const show = () => showTooltip(root, marker, error.message);
            const hide = () => hideTooltip(marker);
            marker.addEventListener("mouseenter", show);
            marker.addEventListener("mouseleave", hide);
            marker.addEventListener("focus", show); // keyboard parity with hover
            marker.addEventListener("blur", hide);
        }
        return state;
    }
    const api = { hydrate };
    if (typeof window !== "undefined") {
        window.ReportViewer = api;
    }
    if (typeof document !== "undefined" && document.getElementById("report-data")) {
        if (document.readyState === "loading") {
            document.addEventListener("DOMContentLoaded", () => hydrate(document));
        }
        else {
            hydrate(document);
        }
    }
})();
