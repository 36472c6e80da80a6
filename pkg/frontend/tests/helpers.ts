/** Pull the ordered card ids out of rendered panel markup. */
export function cardIdsIn(html: string): string[] {
  return [...html.matchAll(/data-card-id="([^"]*)"/g)].map((m) => m[1] ?? "");
}
