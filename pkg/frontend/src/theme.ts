// Theme preview: maps palette roles onto a neutral contact-list mock screen
// (a stand-in for a donor/acceptor listing) and builds the side-by-side
// original-vs-adapted comparison.

import { ApiClient, PaletteDto } from "./api.js";

export interface MockElement {
  id: string;
  label: string;
  role: string;
  kind: "background" | "surface" | "text" | "badge" | "button";
}

// every element's color comes from a palette role
export const MOCK_SCREEN: MockElement[] = [
  { id: "page", label: "Page", role: "background", kind: "background" },
  { id: "card-1", label: "A+ needed — City Hospital", role: "surface", kind: "surface" },
  { id: "card-1-text", label: "Posted 2h ago by M. Osei", role: "text", kind: "text" },
  { id: "card-1-badge", label: "URGENT", role: "accent", kind: "badge" },
  { id: "card-2", label: "O- available — weekend only", role: "surface", kind: "surface" },
  { id: "card-2-text", label: "Posted 1d ago by J. Ruiz", role: "text", kind: "text" },
  { id: "card-2-badge", label: "NEW", role: "warning", kind: "badge" },
  { id: "contact", label: "Contact donor", role: "primary", kind: "button" },
  { id: "post", label: "Post a request", role: "primary", kind: "button" },
];

export const FALLBACK_HEX = "#888888";

export interface RoleColor {
  hex: string;
  missing: boolean;
}

export function colorForRole(palette: PaletteDto, role: string): RoleColor {
  const entry = palette.colors.find((c) => c.role === role);
  if (entry === undefined) {
    return { hex: FALLBACK_HEX, missing: true };
  }
  return { hex: entry.srgb, missing: false };
}

export interface PreviewElement {
  element: MockElement;
  original: RoleColor;
  adapted: RoleColor;
  changed: boolean;
}

export interface PreviewModel {
  elements: PreviewElement[];
  warnings: string[];
}

export function buildPreview(original: PaletteDto, adapted: PaletteDto): PreviewModel {
  const elements: PreviewElement[] = MOCK_SCREEN.map((element) => {
    const before = colorForRole(original, element.role);
    const after = colorForRole(adapted, element.role);
    return {
      element,
      original: before,
      adapted: after,
      changed: before.hex.toUpperCase() !== after.hex.toUpperCase(),
    };
  });
  const warnings = elements
    .filter((e) => e.adapted.missing)
    .map((e) => `role "${e.element.role}" missing from adapted palette; using fallback`);
  return { elements, warnings };
}

export function cssVariables(palette: PaletteDto, prefix = "--theme-"): Record<string, string> {
  const out: Record<string, string> = {};
  for (const color of palette.colors) {
    out[`${prefix}${color.role}`] = color.srgb;
  }
  return out;
}

const SIMULATABLE = new Set(["protan", "deutan", "tritan", "achromat", "normal"]);

/** Per-role simulated swatches fetched from the server, so the preview can
 * show how the adapted palette looks through the classified deficiency. */
export async function simulatedSwatches(
  api: ApiClient,
  palette: PaletteDto,
  kind: string,
  severity: number,
): Promise<Record<string, string>> {
  const out: Record<string, string> = {};
  if (!SIMULATABLE.has(kind)) {
    return out;
  }
  for (const color of palette.colors) {
    out[color.role] = await api.simulateHex(color.srgb, kind, severity);
  }
  return out;
}
