import { defineConfig } from "vite";

// The API server (pneugen serve --workdir ... --port 8008) is proxied under
// /api so the app can be developed and previewed against a live work
// directory without CORS friction.
export default defineConfig({
  server: {
    port: 5173,
    proxy: { "/api": "http://127.0.0.1:8008" },
  },
  preview: {
    port: 5173,
    proxy: { "/api": "http://127.0.0.1:8008" },
  },
  test: {
    environment: "jsdom",
  },
});
