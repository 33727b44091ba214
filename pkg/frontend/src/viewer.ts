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
    interface PositionDescriptor {
        located_in: string;
        table: Record<string, Record<string, number[]>>;
    }

    interface ReportError {
        id: string;
        validation_level: string;
        error_type: "error" | "warning";
        error_label: string;
        valid: boolean;
        message: string;
        position: PositionDescriptor;
    }

    interface ViewerState {
        errors: Map<string, ReportError>;
        markers: HTMLElement[];
        toggle(errorId: string): void;
        active(errorId: string): boolean;
    }

    function readIsland(root: Document): ReportError[] | null {
        const island = root.getElementById("report-data");
        if (!island || island.textContent === null) {
            return null;
        }
        try {
            const parsed = JSON.parse(island.textContent);
            if (!parsed || !Array.isArray(parsed.errors)) {
                return null;
            }
            return parsed.errors as ReportError[];
        } catch {
            return null;
        }
    }

    function showBanner(root: Document, message: string): void {
        const banner = root.getElementById("banner");
        if (banner) {
            banner.textContent = message;
            banner.removeAttribute("hidden");
        }
    }

    let tooltip: HTMLElement | null = null;

    function ensureTooltip(root: Document): HTMLElement {
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

    function showTooltip(root: Document, marker: HTMLElement, message: string): void {
        const tip = ensureTooltip(root);
        tip.textContent = message;
        tip.removeAttribute("hidden");
        const rect = marker.getBoundingClientRect();
        tip.style.left = `${rect.left + (root.defaultView?.scrollX ?? 0)}px`;
        tip.style.top = `${rect.bottom + 6 + (root.defaultView?.scrollY ?? 0)}px`;
        marker.setAttribute("aria-describedby", "err-tooltip");
    }

    function hideTooltip(marker: HTMLElement): void {
        if (tooltip) {
            tooltip.setAttribute("hidden", "");
        }
        marker.removeAttribute("aria-describedby");
    }

    function spansFor(root: Document, errorId: string): HTMLElement[] {
        const nodes = root.querySelectorAll(`.err-span[data-eid="${errorId}"]`);
        return Array.prototype.slice.call(nodes) as HTMLElement[];
    }

    function hydrate(root: Document): ViewerState {
        const state: ViewerState = {
            errors: new Map(),
            markers: [],
            toggle: (errorId: string) => toggle(errorId),
            active: (errorId: string) => activeIds.has(errorId),
        };
        const activeIds = new Set<string>();

        function toggle(errorId: string): void {
            if (!state.errors.has(errorId)) {
                return; // unknown id: no-op
            }
            const turnOn = !activeIds.has(errorId);
            if (turnOn) {
                activeIds.add(errorId);
            } else {
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
            const marker = markers[i] as HTMLElement;
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
        (window as unknown as Record<string, unknown>).ReportViewer = api;
    }
    if (typeof document !== "undefined" && document.getElementById("report-data")) {
        if (document.readyState === "loading") {
            document.addEventListener("DOMContentLoaded", () => hydrate(document));
        } else {
            hydrate(document);
        }
    }
})();
